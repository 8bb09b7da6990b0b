"""Geodesic shooting, polar disk grids, and bending-energy quadrature.

A chart supplies the metric, Christoffel symbols, bending density and a
domain margin as plain callbacks; the engine integrates the geodesic system
with the running arclength carried alongside the state, so rays can be
sampled at exact arclengths and stopped by boundary events.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .errors import BoundaryExceededError, StartOnSingularityError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class SurfaceChart:
    """Callbacks describing one coordinate chart of an immersed surface.

    metric(c1, c2)      -> (g11, g12, g22), arrays allowed
    christoffel(c1, c2) -> (G111, G211, G112, G212, G122, G222)
    density(c1, c2)     -> k1^2 + k2^2
    domain_margin(c1, c2) -> float, positive strictly inside the safe domain,
                             reaching 0 on its boundary (used as an event)
    ``param`` is the family parameter quoted in energy reports.
    """

    name: str
    metric: Callable
    christoffel: Callable
    density: Callable
    domain_margin: Callable
    param: float = math.nan

    def speed(self, c1, c2, p1, p2):
        g11, g12, g22 = self.metric(c1, c2)
        q = g11 * p1 * p1 + 2.0 * g12 * p1 * p2 + g22 * p2 * p2
        return np.sqrt(q)

    def orthonormal_frame(self, c1: float, c2: float):
        """Right-handed orthonormal tangent basis (e1 along coordinate 1)."""
        g11, g12, g22 = self.metric(c1, c2)
        det = g11 * g22 - g12 * g12
        if g11 <= 0 or det <= 0:
            raise ValueError("metric is not positive definite at the center")
        e1 = np.array([1.0 / math.sqrt(g11), 0.0])
        e2 = np.array([-g12, g11]) / math.sqrt(g11 * det)
        return e1, e2


@dataclass(frozen=True)
class GeodesicPath:
    """Dense solution of one geodesic shot, arclength-addressable."""

    chart: SurfaceChart
    sol: object
    t_end: float
    s_end: float
    requested_length: float
    hit_boundary: bool

    def state_at_arclength(self, s):
        """Coordinates and velocities at the given arclength(s).

        The affine parameter is launched at unit speed, so t = s up to the
        integration tolerance; one Newton correction on the carried arclength
        removes even that.
        """
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s_arr < -1e-12) or np.any(s_arr > self.s_end + 1e-9):
            raise ValueError(f"arclength outside [0, {self.s_end:.6g}]")
        t = np.clip(s_arr, 0.0, self.t_end)
        for _ in range(3):
            y = self.sol(t)
            ds = y[4] - s_arr
            spd = self.chart.speed(y[0], y[1], y[2], y[3])
            t = np.clip(t - ds / spd, 0.0, self.t_end)
            if np.max(np.abs(ds)) < 1e-13:
                break
        y = self.sol(t)
        return y[0:2], y[2:4]


def _geodesic_rhs(chart: SurfaceChart):
    def rhs(t, y):
        c1, c2, p1, p2, _ = y
        G111, G211, G112, G212, G122, G222 = chart.christoffel(c1, c2)
        a1 = -(G111 * p1 * p1 + 2.0 * G112 * p1 * p2 + G122 * p2 * p2)
        a2 = -(G211 * p1 * p1 + 2.0 * G212 * p1 * p2 + G222 * p2 * p2)
        return [p1, p2, a1, a2, chart.speed(c1, c2, p1, p2)]
    return rhs


def shoot_geodesic(chart: SurfaceChart,
                   start: Sequence[float],
                   direction: Sequence[float],
                   length: float,
                   *,
                   rtol: float = 1e-10,
                   atol: float = 1e-12) -> GeodesicPath:
    """Shoot a unit-speed geodesic for the given arclength.

    The direction is normalized in the metric of the chart.  Integration
    stops early (``hit_boundary`` set, shorter ``s_end``) if the chart's
    domain margin falls to zero.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    c1, c2 = float(start[0]), float(start[1])
    if chart.domain_margin(c1, c2) <= 0.0:
        raise StartOnSingularityError(
            f"chart {chart.name!r}: start {(c1, c2)} is outside the safe domain")
    d1, d2 = float(direction[0]), float(direction[1])
    spd = float(chart.speed(c1, c2, d1, d2))
    if not spd > 0:
        raise ValueError("direction must be a nonzero tangent vector")
    y0 = [c1, c2, d1 / spd, d2 / spd, 0.0]
    if length == 0.0:
        sol = _ConstantSolution(np.array(y0))
        return GeodesicPath(chart, sol, 0.0, 0.0, 0.0, False)

    def hit_length(t, y):
        return y[4] - length
    hit_length.terminal = True
    hit_length.direction = 1

    def hit_boundary(t, y):
        return chart.domain_margin(y[0], y[1])
    hit_boundary.terminal = True
    hit_boundary.direction = -1

    res = solve_ivp(_geodesic_rhs(chart), (0.0, 1.25 * length + 1e-3), y0,
                    method="DOP853", rtol=rtol, atol=atol, dense_output=True,
                    events=(hit_length, hit_boundary))
    if res.t_events[1].size:
        t_end = float(res.t_events[1][0])
        s_end = float(res.y_events[1][0][4])
        return GeodesicPath(chart, res.sol, t_end, s_end, length, True)
    if res.t_events[0].size:
        t_end = float(res.t_events[0][0])
        return GeodesicPath(chart, res.sol, t_end, length, length, False)
    if res.status == -1:
        # Step-size underflow: on charts whose boundary is a square-root
        # singularity of the affine parameter the margin event may sit below
        # the smallest reachable step.  If the margin has in fact collapsed,
        # the ray has met the boundary to float precision.
        m_end = float(chart.domain_margin(res.y[0, -1], res.y[1, -1]))
        m_start = float(chart.domain_margin(c1, c2))
        if m_end <= 1e-3 * m_start:
            t_end = float(res.t[-1])
            return GeodesicPath(chart, res.sol, t_end, float(res.y[4, -1]),
                                length, True)
    raise RuntimeError(
        f"geodesic integration on chart {chart.name!r} ended at s = "
        f"{res.y[4, -1]:.6g} before reaching length {length:.6g}: {res.message}")


class _ConstantSolution:
    """Dense-output stand-in for a zero-length shot."""

    def __init__(self, y0: np.ndarray):
        self._y0 = y0

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return self._y0.copy()
        return np.repeat(self._y0[:, None], t_arr.size, axis=1)


@dataclass(frozen=True)
class GeodesicPolarGrid:
    """Geodesic polar lattice: rays at equal angles, nodes at equal radii."""

    chart: SurfaceChart
    center: tuple[float, float]
    R: float
    r: np.ndarray
    psi: np.ndarray
    coords: np.ndarray          # (n_r+1, n_psi, 2)
    density: np.ndarray         # (n_r+1, n_psi)


def build_polar_grid(chart: SurfaceChart,
                     center: Sequence[float],
                     R: float,
                     n_r: int = 128,
                     n_psi: int = 256,
                     *,
                     rtol: float = 1e-10,
                     atol: float = 1e-12) -> GeodesicPolarGrid:
    """Shoot ``n_psi`` rays and sample them at ``n_r`` + 1 equal arclengths.

    Raises BoundaryExceededError (carrying the attainable radius and the
    blocking direction) if any ray meets the domain boundary before R.
    A zero radius yields the degenerate single-circle grid with no shooting.
    """
    c0 = (float(center[0]), float(center[1]))
    if chart.domain_margin(*c0) <= 0.0:
        raise StartOnSingularityError(
            f"chart {chart.name!r}: polar center {c0} is outside the safe domain")
    psi = 2.0 * math.pi * np.arange(n_psi) / n_psi
    r = R * np.arange(n_r + 1) / max(n_r, 1) if R > 0 else np.zeros(1)
    coords = np.empty((r.size, n_psi, 2))
    coords[0, :, 0], coords[0, :, 1] = c0
    if R > 0:
        e1, e2 = chart.orthonormal_frame(*c0)
        for j, a in enumerate(psi):
            direction = math.cos(a) * e1 + math.sin(a) * e2
            path = shoot_geodesic(chart, c0, direction, R, rtol=rtol, atol=atol)
            if path.hit_boundary:
                raise BoundaryExceededError(
                    f"chart {chart.name!r}: ray at polar angle {a:.6f} met the "
                    f"domain boundary at arclength {path.s_end:.9f} < R = {R:.9f}",
                    attained_radius=path.s_end, blocking_direction=float(a))
            pos, _ = path.state_at_arclength(r[1:])
            coords[1:, j, 0] = pos[0]
            coords[1:, j, 1] = pos[1]
    density = np.asarray(chart.density(coords[..., 0], coords[..., 1]), dtype=float)
    return GeodesicPolarGrid(chart, c0, float(R), r, psi, coords, density)


def _ray_quadrature(r: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Per-ray integral of sinh(r) * spline(values) by 5-point GL panels."""
    if r.size < 2:
        return np.zeros(values.shape[1])
    spline = CubicSpline(r, values, axis=0)
    mid = 0.5 * (r[:-1] + r[1:])
    half = 0.5 * np.diff(r)
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    f = spline(nodes) * np.sinh(nodes)[:, None]
    return np.einsum("g,gj->j", weights, f)


def bending_energy(grid: GeodesicPolarGrid) -> tuple[float, float]:
    """Disk bending energy  int_0^{2pi} int_0^R sinh(r) rho dr dPsi.

    Periodic trapezoid (= spectral) in the polar angle, Gauss-Legendre panels
    on a cubic-spline interpolant along each ray.  Returns (energy,
    refinement-based error estimate).
    """
    if grid.R == 0.0:
        return 0.0, 0.0
    dpsi = 2.0 * math.pi / grid.psi.size
    per_ray = _ray_quadrature(grid.r, grid.density)
    energy = dpsi * float(np.sum(per_ray))
    # half-resolution comparison on the stored nodes
    r_half = grid.r[::2]
    j_half = np.arange(0, grid.psi.size, 2)
    if r_half.size >= 3 and j_half.size >= 2:
        per_ray_h = _ray_quadrature(r_half, grid.density[::2][:, j_half])
        e_half = (2.0 * math.pi / j_half.size) * float(np.sum(per_ray_h))
        err = abs(energy - e_half)
    else:
        err = math.nan
    return energy, err


def energy_floor(R: float) -> float:
    """Lower bound 4*pi*(cosh R - 1) for the disk bending energy."""
    return 4.0 * math.pi * (math.cosh(R) - 1.0)


@dataclass
class EnergyRow:
    surface: str
    param: float
    R: float
    energy: float
    err_estimate: float
    N_r: int
    N_psi: int


CSV_HEADER = ["surface", "param", "R", "energy", "err_estimate", "N_r", "N_psi"]


@dataclass
class EnergyReport:
    """Accumulates (surface, param, R) -> energy rows; CSV round-trip."""

    rows: list[EnergyRow] = dc_field(default_factory=list)

    def add(self, row: EnergyRow) -> None:
        self.rows.append(row)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.rows:
                w.writerow([r.surface, f"{r.param:.12g}", f"{r.R:.12g}",
                            f"{r.energy:.12g}", f"{r.err_estimate:.6g}",
                            r.N_r, r.N_psi])

    @classmethod
    def from_csv(cls, path: str | Path) -> "EnergyReport":
        from .errors import SchemaError
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_HEADER:
                raise SchemaError(f"{path}: expected header {CSV_HEADER}, got {header}")
            rows = [EnergyRow(s, float(p), float(R), float(E), float(err),
                              int(nr), int(npsi))
                    for s, p, R, E, err, nr, npsi in reader]
        return cls(rows)


def disk_energy(chart: SurfaceChart,
                center: Sequence[float],
                R: float,
                *,
                n_r: int = 128,
                n_psi: int = 256,
                refine_rel: float = 1e-4,
                max_doublings: int = 3,
                rtol: float = 1e-10,
                atol: float = 1e-12) -> EnergyRow:
    """Energy with automatic resolution doubling to a relative agreement."""
    nr, npsi = n_r, n_psi
    grid = build_polar_grid(chart, center, R, nr, npsi, rtol=rtol, atol=atol)
    energy, err = bending_energy(grid)
    for _ in range(max_doublings):
        nr2, npsi2 = 2 * nr, 2 * npsi
        grid2 = build_polar_grid(chart, center, R, nr2, npsi2, rtol=rtol, atol=atol)
        energy2, err2 = bending_energy(grid2)
        delta = abs(energy2 - energy)
        energy, err, nr, npsi = energy2, max(err2, delta), nr2, npsi2
        if delta <= refine_rel * max(1.0, abs(energy2)):
            break
    return EnergyRow(chart.name, chart.param, float(R), energy, err, nr, npsi)


def attainable_radius(chart: SurfaceChart,
                      center: Sequence[float],
                      psi: float,
                      cap: float,
                      *,
                      rtol: float = 1e-10,
                      atol: float = 1e-12) -> float:
    """Arclength available along one polar direction before the boundary.

    Returns ``inf`` if the ray reaches the cap without meeting the boundary.
    """
    e1, e2 = chart.orthonormal_frame(float(center[0]), float(center[1]))
    direction = math.cos(psi) * e1 + math.sin(psi) * e2
    path = shoot_geodesic(chart, center, direction, cap, rtol=rtol, atol=atol)
    return path.s_end if path.hit_boundary else math.inf


def max_disk_radius_shooting(chart: SurfaceChart,
                             center: Sequence[float],
                             cap: float,
                             *,
                             n_scan: int = 16,
                             xtol: float = 1e-6,
                             rtol: float = 1e-10,
                             atol: float = 1e-12) -> float:
    """Largest geodesic disk radius around ``center`` found by shooting.

    Coarse scan over directions, then bounded scalar minimization of the
    per-direction attainable radius around the worst direction.
    """
    psis = 2.0 * math.pi * np.arange(n_scan) / n_scan
    vals = np.array([attainable_radius(chart, center, p, cap,
                                       rtol=rtol, atol=atol) for p in psis])
    if np.all(np.isinf(vals)):
        return math.inf
    j = int(np.argmin(vals))
    lo = psis[j] - 2.0 * math.pi / n_scan
    hi = psis[j] + 2.0 * math.pi / n_scan

    def f(p):
        v = attainable_radius(chart, center, p, cap, rtol=rtol, atol=atol)
        return v if math.isfinite(v) else cap

    res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                          options={"xatol": xtol})
    return float(min(res.fun, float(np.min(vals))))
