"""Asymptotic-line (Chebyshev net) fields, meshes, and frame integration.

A surface of Gaussian curvature -1 carries coordinates (u, v) along its
asymptotic lines in which the metric is du^2 + 2 cos(phi) du dv + dv^2 and the
second fundamental form is off-diagonal with entry sin(phi); phi(u, v) in
(0, pi) is the angle between the asymptotic directions and satisfies the
sine-Gordon equation phi_uv = lam * sin(phi).  This module holds the sampled
representation of such angle fields, the pointwise curvature/energy-density
maps, the compatibility residual, and the lattice march that rebuilds the
surface in R^3 from the angle field (Gauss map included).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InconsistentFieldError, SingularAngleError

DEFAULT_ANGLE_GUARD = 1e-6


def _check_uniform(axis: np.ndarray, name: str) -> float:
    if axis.ndim != 1 or axis.size < 2:
        raise ValueError(f"{name} axis must be 1-D with at least two samples")
    steps = np.diff(axis)
    h = float(steps[0])
    if h <= 0 or not np.allclose(steps, h, rtol=1e-9, atol=1e-12):
        raise ValueError(f"{name} axis must be uniformly increasing")
    return h


def _validate_mask(mask: np.ndarray) -> None:
    """The valid set must be a staircase closed toward the (0, 0) corner."""
    if not mask[0, :].all() or not mask[:, 0].all():
        raise ValueError("mask must keep the first row and first column valid")
    heights = mask.sum(axis=1)
    if np.any(np.diff(heights) > 0):
        raise ValueError("mask valid-heights must be nonincreasing along u")
    for i, m in enumerate(heights):
        if not mask[i, :m].all() or mask[i, m:].any():
            raise ValueError("mask columns must be contiguous prefixes")


@dataclass(frozen=True)
class GeneratingAngleField:
    """Sampled generating angle phi on a uniform (u, v) lattice.

    ``mask`` (optional) marks the valid nodes when the field lives on a
    staircase subregion of the rectangle (entries outside may be NaN).  All
    valid angles must lie strictly inside (0, pi); offenders raise rather
    than being clamped.
    """

    u: np.ndarray
    v: np.ndarray
    phi: np.ndarray
    lam: float
    mask: np.ndarray | None = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "phi", phi)
        hu = _check_uniform(u, "u")
        hv = _check_uniform(v, "v")
        object.__setattr__(self, "_h", (hu, hv))
        if phi.shape != (u.size, v.size):
            raise ValueError(f"phi shape {phi.shape} does not match axes "
                             f"({u.size}, {v.size})")
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != phi.shape:
                raise ValueError("mask shape must match phi")
            _validate_mask(mask)
            object.__setattr__(self, "mask", mask)
        vals = phi if self.mask is None else phi[self.mask]
        if not np.all(np.isfinite(vals)):
            raise SingularAngleError("angle field contains non-finite values "
                                     "at valid nodes")
        bad = int(np.sum((vals <= 0.0) | (vals >= math.pi)))
        if bad:
            raise SingularAngleError(
                f"{bad} node(s) have generating angle outside the open "
                f"interval (0, pi); refusing to clamp")

    @property
    def h_u(self) -> float:
        return self._h[0]

    @property
    def h_v(self) -> float:
        return self._h[1]

    @property
    def valid_mask(self) -> np.ndarray:
        if self.mask is not None:
            return self.mask
        return np.ones(self.phi.shape, dtype=bool)

    def column_heights(self) -> np.ndarray:
        return self.valid_mask.sum(axis=1)


def principal_curvature_squares(phi: np.ndarray | float):
    """(k1^2, k2^2) = (tan^2(phi/2), cot^2(phi/2)) for phi in (0, pi)."""
    phi_arr = np.asarray(phi, dtype=float)
    if np.any(phi_arr <= 0.0) or np.any(phi_arr >= math.pi):
        raise SingularAngleError("principal curvatures need phi in (0, pi)")
    t = np.tan(0.5 * phi_arr)
    k1sq = t * t
    k2sq = 1.0 / k1sq
    if np.ndim(phi) == 0:
        return float(k1sq), float(k2sq)
    return k1sq, k2sq


def bending_density(phi: np.ndarray | float):
    """k1^2 + k2^2 = 4/sin^2(phi) - 2, the pointwise bending-energy density."""
    phi_arr = np.asarray(phi, dtype=float)
    if np.any(phi_arr <= 0.0) or np.any(phi_arr >= math.pi):
        raise SingularAngleError("bending density needs phi in (0, pi)")
    s = np.sin(phi_arr)
    out = 4.0 / (s * s) - 2.0
    return float(out) if np.ndim(phi) == 0 else out


def sine_gordon_residual(field: GeneratingAngleField) -> float:
    """Max |D_uv phi - lam sin phi| over interior nodes, wide cross stencil.

    D_uv is the centered cross difference
    (phi[i+1,j+1] - phi[i+1,j-1] - phi[i-1,j+1] + phi[i-1,j-1]) / (4 hu hv),
    evaluated wherever all four diagonal neighbours are valid.
    """
    phi = field.phi
    if phi.shape[0] < 3 or phi.shape[1] < 3:
        return 0.0
    hu, hv = field.h_u, field.h_v
    cross = (phi[2:, 2:] - phi[2:, :-2] - phi[:-2, 2:] + phi[:-2, :-2]) / (4 * hu * hv)
    res = cross - field.lam * np.sin(phi[1:-1, 1:-1])
    m = field.valid_mask
    ok = m[2:, 2:] & m[2:, :-2] & m[:-2, 2:] & m[:-2, :-2] & m[1:-1, 1:-1]
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(res[ok])))


@dataclass(frozen=True)
class SurfaceMesh:
    """Vertex grid of an immersed patch plus the angle field that made it.

    ``vertices`` has shape (Nu, Nv, 3) with NaN rows at invalid nodes;
    ``normals`` likewise.  Faces are the lattice quads whose four corners are
    all valid.
    """

    u: np.ndarray
    v: np.ndarray
    vertices: np.ndarray
    phi: np.ndarray
    normals: np.ndarray | None = None
    mask: np.ndarray | None = None

    @property
    def valid_mask(self) -> np.ndarray:
        if self.mask is not None:
            return np.asarray(self.mask, dtype=bool)
        return np.ones(self.phi.shape, dtype=bool)

    def lattice_edge_deviation(self) -> float:
        """Max | |edge| - h | over lattice edges, for unit-speed nets."""
        m = self.valid_mask
        x = self.vertices
        du = np.linalg.norm(x[1:, :, :] - x[:-1, :, :], axis=2)
        dv = np.linalg.norm(x[:, 1:, :] - x[:, :-1, :], axis=2)
        eu = du[m[1:, :] & m[:-1, :]] - (self.u[1] - self.u[0])
        ev = dv[m[:, 1:] & m[:, :-1]] - (self.v[1] - self.v[0])
        worst = 0.0
        if eu.size:
            worst = max(worst, float(np.max(np.abs(eu))))
        if ev.size:
            worst = max(worst, float(np.max(np.abs(ev))))
        return worst

    def discrete_gaussian_curvature(self) -> np.ndarray:
        """Angle defect over vertex area at interior valid vertices.

        Every lattice quad is split along its (+u, +v) diagonal, producing a
        valence-6 fan at each interior vertex; the defect 2*pi minus the six
        fan angles, divided by a third of the fan area, converges to the
        Gaussian curvature at O(h^2).  (A fan over the four edge neighbours
        alone is blind to curvature on asymptotic-line lattices: those
        directions have zero normal curvature.)  Returns an (Nu, Nv) array,
        NaN where the neighbourhood is incomplete.
        """
        x = self.vertices
        m = self.valid_mask
        out = np.full(self.phi.shape, np.nan)
        center = x[1:-1, 1:-1]
        fan = [x[2:, 1:-1], x[2:, 2:], x[1:-1, 2:],
               x[:-2, 1:-1], x[:-2, :-2], x[1:-1, :-2]]
        total = np.zeros(center.shape[:2])
        area = np.zeros(center.shape[:2])
        for k in range(6):
            a = fan[k] - center
            b = fan[(k + 1) % 6] - center
            cr = np.cross(a, b)
            nrm = np.linalg.norm(cr, axis=-1)
            total += np.arctan2(nrm, np.einsum("...k,...k", a, b))
            area += 0.5 * nrm
        defect = 2.0 * math.pi - total
        ok = (m[1:-1, 1:-1] & m[2:, 1:-1] & m[2:, 2:] & m[1:-1, 2:]
              & m[:-2, 1:-1] & m[:-2, :-2] & m[1:-1, :-2] & (area > 0))
        out[1:-1, 1:-1] = np.where(ok, defect / np.where(area > 0, area / 3.0, 1.0),
                                   np.nan)
        return out

    def _valid_index_map(self):
        m = self.valid_mask
        idx = np.full(m.shape, -1, dtype=int)
        idx[m] = np.arange(int(m.sum()))
        return idx

    def to_obj(self, path: str | Path) -> None:
        """Write vertices and quad faces as Wavefront OBJ (1-indexed)."""
        idx = self._valid_index_map()
        m = self.valid_mask
        lines = []
        for i, j in zip(*np.nonzero(m)):
            p = self.vertices[i, j]
            lines.append(f"v {p[0]:.12g} {p[1]:.12g} {p[2]:.12g}")
        if self.normals is not None:
            for i, j in zip(*np.nonzero(m)):
                n = self.normals[i, j]
                lines.append(f"vn {n[0]:.9g} {n[1]:.9g} {n[2]:.9g}")
        quad_ok = m[:-1, :-1] & m[1:, :-1] & m[1:, 1:] & m[:-1, 1:]
        for i, j in zip(*np.nonzero(quad_ok)):
            a = idx[i, j] + 1
            b = idx[i + 1, j] + 1
            c = idx[i + 1, j + 1] + 1
            d = idx[i, j + 1] + 1
            lines.append(f"f {a} {b} {c} {d}")
        Path(path).write_text("\n".join(lines) + "\n")

    def to_csv(self, path: str | Path) -> None:
        """Write per-vertex rows: u, v, x, y, z, phi, density."""
        m = self.valid_mask
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v", "x", "y", "z", "phi", "density"])
            for i, j in zip(*np.nonzero(m)):
                p = self.vertices[i, j]
                phi = float(self.phi[i, j])
                w.writerow([f"{self.u[i]:.12g}", f"{self.v[j]:.12g}",
                            f"{p[0]:.12g}", f"{p[1]:.12g}", f"{p[2]:.12g}",
                            f"{phi:.12g}", f"{float(bending_density(phi)):.12g}"])


@dataclass(frozen=True)
class FrameAnchor:
    """Initial position and orientation for the lattice march.

    ``rotation`` (3x3 orthogonal) turns the default frame, whose tangents at
    the origin corner are (1,0,0) and (cos phi0, sin phi0, 0) with normal
    (0,0,1).
    """

    origin: np.ndarray = dc_field(default_factory=lambda: np.zeros(3))
    rotation: np.ndarray = dc_field(default_factory=lambda: np.eye(3))

    def initial_frame(self, phi0: float):
        R = np.asarray(self.rotation, dtype=float)
        if R.shape != (3, 3) or not np.allclose(R @ R.T, np.eye(3), atol=1e-10):
            raise ValueError("anchor rotation must be a 3x3 orthogonal matrix")
        x_u = R @ np.array([1.0, 0.0, 0.0])
        x_v = R @ np.array([math.cos(phi0), math.sin(phi0), 0.0])
        nrm = R @ np.array([0.0, 0.0, 1.0])
        return np.asarray(self.origin, dtype=float).copy(), x_u, x_v, nrm


def _pad_staircase(phi: np.ndarray, heights: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Fill invalid tail of each column by quadratic continuation (spline aid)."""
    out = phi.copy()
    n_v = phi.shape[1]
    for i, m in enumerate(heights):
        if m >= n_v:
            continue
        k = min(3, m)
        coeff = np.polyfit(v[m - k:m], phi[i, m - k:m], k - 1)
        out[i, m:] = np.polyval(coeff, v[m:])
    return out


def _march_rows_then_columns(field: GeneratingAngleField, anchor: FrameAnchor):
    """RK4 lattice march: frame along the first u-row, then along v columns."""
    u_ax, v_ax = field.u, field.v
    n_u, n_v = u_ax.size, v_ax.size
    heights = field.column_heights()
    phi_grid = field.phi if field.mask is None else _pad_staircase(
        field.phi, heights, v_ax)

    x0, xu0, xv0, n0 = anchor.initial_frame(float(phi_grid[0, 0]))

    # --- first row: d/du (x, x_u, x_v, N) with coefficients phi, phi_u ---
    row_spline = CubicSpline(u_ax, phi_grid[:, 0])
    row_slope = row_spline.derivative()

    def row_rhs(uu, state):
        x, xu, xv, nn = state
        p = float(row_spline(uu))
        pu = float(row_slope(uu))
        cot, csc = math.cos(p) / math.sin(p), 1.0 / math.sin(p)
        return (xu,
                cot * pu * xu - csc * pu * xv,
                math.sin(p) * nn,
                cot * xu - csc * xv)

    row_states = [(x0, xu0, xv0, n0)]
    for i in range(n_u - 1):
        a, b = u_ax[i], u_ax[i + 1]
        h = b - a
        y = row_states[-1]
        k1 = row_rhs(a, y)
        k2 = row_rhs(a + h / 2, tuple(y[q] + h / 2 * k1[q] for q in range(4)))
        k3 = row_rhs(a + h / 2, tuple(y[q] + h / 2 * k2[q] for q in range(4)))
        k4 = row_rhs(b, tuple(y[q] + h * k3[q] for q in range(4)))
        row_states.append(tuple(
            y[q] + h / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]) for q in range(4)))

    # --- columns: d/dv of the frame, vectorized across all u columns ---
    col_spline = CubicSpline(v_ax, phi_grid, axis=1)
    col_slope = col_spline.derivative()

    X = np.full((n_u, n_v, 3), np.nan)
    XU = np.full((n_u, n_v, 3), np.nan)
    N = np.full((n_u, n_v, 3), np.nan)
    x = np.array([s[0] for s in row_states])
    xu = np.array([s[1] for s in row_states])
    xv = np.array([s[2] for s in row_states])
    nn = np.array([s[3] for s in row_states])
    X[:, 0], XU[:, 0], N[:, 0] = x, xu, nn
    XV = np.full((n_u, n_v, 3), np.nan)
    XV[:, 0] = xv

    def col_rhs(vv, x, xu, xv, nn):
        p = col_spline(vv)
        pv = col_slope(vv)
        s = np.sin(p)[:, None]
        cot = (np.cos(p) / np.sin(p))[:, None]
        csc = (1.0 / np.sin(p))[:, None]
        pvc = pv[:, None]
        return (xv,
                s * nn,
                -csc * pvc * xu + cot * pvc * xv,
                -csc * xu + cot * xv)

    state = (x.copy(), xu.copy(), xv.copy(), nn.copy())
    for j in range(n_v - 1):
        a, b = v_ax[j], v_ax[j + 1]
        h = b - a
        active = heights > j + 1
        if not active.any():
            break
        y = state
        k1 = col_rhs(a, *y)
        k2 = col_rhs(a + h / 2, *(y[q] + h / 2 * k1[q] for q in range(4)))
        k3 = col_rhs(a + h / 2, *(y[q] + h / 2 * k2[q] for q in range(4)))
        k4 = col_rhs(b, *(y[q] + h * k3[q] for q in range(4)))
        new = tuple(y[q] + h / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q])
                    for q in range(4))
        act = active[:, None]
        state = tuple(np.where(act, new[q], y[q]) for q in range(4))
        X[active, j + 1] = state[0][active]
        XU[active, j + 1] = state[1][active]
        XV[active, j + 1] = state[2][active]
        N[active, j + 1] = state[3][active]
    return X, XU, XV, N


def _transposed_field(field: GeneratingAngleField) -> GeneratingAngleField:
    mask_t = None if field.mask is None else field.mask.T
    if mask_t is not None:
        # transposing a staircase keeps it a staircase
        return GeneratingAngleField(field.v, field.u, field.phi.T, field.lam, mask_t)
    return GeneratingAngleField(field.v, field.u, field.phi.T, field.lam)


def integrate_frame(field: GeneratingAngleField,
                    anchor: FrameAnchor | None = None,
                    *,
                    angle_guard: float = DEFAULT_ANGLE_GUARD,
                    residual_threshold: float = 0.05,
                    check_compatibility: bool = True) -> SurfaceMesh:
    """Rebuild the immersed patch from its angle field by lattice marching.

    The structure equations in asymptotic coordinates are
        x_uu = cot(phi) phi_u x_u - csc(phi) phi_u x_v
        x_uv = sin(phi) N
        x_vv = -csc(phi) phi_v x_u + cot(phi) phi_v x_v
        N_u  = cot(phi) x_u - csc(phi) x_v
        N_v  = -csc(phi) x_u + cot(phi) x_v
    integrated with RK4 (coefficients spline-resampled at half steps) along
    the first row in u and then along every column in v.  A transposed march
    (v first) cross-checks path independence; disagreement beyond the O(h^2)
    budget raises InconsistentFieldError, as does a sine-Gordon residual above
    ``residual_threshold``.
    """
    if anchor is None:
        anchor = FrameAnchor()
    vals = field.phi[field.valid_mask]
    if np.any(vals <= angle_guard) or np.any(vals >= math.pi - angle_guard):
        raise SingularAngleError(
            f"angle field touches the guard band (delta = {angle_guard:g}); "
            f"frame integration would be ill-conditioned")
    res = sine_gordon_residual(field)
    if res > residual_threshold:
        raise InconsistentFieldError(
            f"sine-Gordon residual {res:.3e} exceeds threshold "
            f"{residual_threshold:.3e}; field is not a compatible net")

    X, XU, XV, N = _march_rows_then_columns(field, anchor)

    if check_compatibility:
        swapped = FrameAnchor(origin=anchor.origin,
                              rotation=_swap_uv_rotation(anchor, field))
        Xt, _, _, _ = _march_rows_then_columns(_transposed_field(field), swapped)
        m = field.valid_mask
        diff = np.nanmax(np.linalg.norm(
            np.where(m[..., None], X - np.transpose(Xt, (1, 0, 2)), 0.0), axis=2))
        hu, hv = field.h_u, field.h_v
        span = (field.u[-1] - field.u[0]) + (field.v[-1] - field.v[0])
        budget = 25.0 * (hu + hv) ** 2 * max(1.0, span) + 20.0 * res * max(1.0, span) ** 2
        if diff > budget:
            raise InconsistentFieldError(
                f"u-first and v-first marches disagree by {diff:.3e} "
                f"(budget {budget:.3e}); angle field is not integrable")

    norms = np.linalg.norm(N, axis=2, keepdims=True)
    with np.errstate(invalid="ignore"):
        N_unit = N / np.where(norms > 0, norms, 1.0)
    return SurfaceMesh(u=field.u, v=field.v, vertices=X, phi=field.phi,
                       normals=N_unit, mask=field.mask)


def _swap_uv_rotation(anchor: FrameAnchor, field: GeneratingAngleField) -> np.ndarray:
    """Rotation giving the transposed march the same initial tangent pair.

    The structure equations are invariant under (u, x_u) <-> (v, x_v) with an
    unchanged normal (the second fundamental form is symmetric), so the
    transposed march must start from the frame (x_v, x_u, +N).  The map that
    achieves this from the default frame is orthogonal with determinant -1
    (the swap reverses parameter-plane orientation).
    """
    phi0 = float(field.phi[0, 0])
    _, xu, xv, nrm = anchor.initial_frame(phi0)
    default = FrameAnchor()
    _, eu, ev, en = default.initial_frame(phi0)
    A = np.column_stack([eu, ev, en])
    B = np.column_stack([xv, xu, nrm])
    return B @ np.linalg.inv(A)
