"""The pseudosphere (tractrix surface of revolution, K = -1).

Chart coordinates are (eta, xi): eta > 0 runs along the profile away from the
singular rim, xi is the unwound revolution angle (kept on the universal
cover, so geodesic disks may overlap themselves without coordinate seams).
"""

from __future__ import annotations

import math

import numpy as np

from .chebyshev import SurfaceMesh
from .geodesics import (EnergyRow, SurfaceChart, disk_energy as _engine_disk_energy,
                        max_disk_radius_shooting)

DEFAULT_ETA_FLOOR = 1e-8


def generating_angle(eta):
    """Angle between asymptotic directions: phi = 4 arctan(e^-eta)."""
    return 4.0 * np.arctan(np.exp(-np.asarray(eta, dtype=float)))


def embed(eta, xi):
    """Embedding (cos xi / cosh eta, sin xi / cosh eta, eta - tanh eta)."""
    eta = np.asarray(eta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    ch = np.cosh(eta)
    return np.stack(np.broadcast_arrays(np.cos(xi) / ch, np.sin(xi) / ch,
                                        eta - np.tanh(eta)), axis=-1)


def metric(eta, xi):
    """Diagonal metric (tanh^2 eta, 0, sech^2 eta)."""
    eta = np.asarray(eta, dtype=float)
    th = np.tanh(eta)
    sech2 = 1.0 / np.cosh(eta) ** 2
    return th * th, np.zeros_like(th), sech2


def christoffel(eta, xi):
    """Christoffel symbols of the (eta, xi) chart (derived from the metric)."""
    eta = np.asarray(eta, dtype=float)
    recip = 1.0 / (np.sinh(eta) * np.cosh(eta))
    zero = np.zeros_like(recip)
    return recip, zero, zero, -np.tanh(eta), recip, zero


def density(eta, xi):
    """Bending density k1^2 + k2^2 = sinh^2 eta + 1/sinh^2 eta."""
    s = np.sinh(np.asarray(eta, dtype=float))
    return s * s + 1.0 / (s * s)


def chart(eta0: float = math.nan,
          eta_floor: float = DEFAULT_ETA_FLOOR) -> SurfaceChart:
    """Chart for the geodesic engine; ``eta0`` only labels energy reports."""

    def margin(eta, xi):
        return eta - eta_floor

    return SurfaceChart(name="pseudosphere", metric=metric,
                        christoffel=christoffel, density=density,
                        domain_margin=margin, param=eta0)


def max_disk_radius(eta0: float) -> float:
    """Radius of the largest geodesic disk centered at (eta0, .): ln cosh eta0."""
    if eta0 <= 0:
        raise ValueError("disk center must have eta0 > 0")
    return math.log(math.cosh(eta0))


def max_disk_radius_by_shooting(eta0: float, *, xtol: float = 1e-7) -> float:
    """Shooting/boundary-event verification of the closed-form disk radius."""
    cap = 2.0 * max_disk_radius(eta0) + 1.0
    return max_disk_radius_shooting(chart(eta0), (eta0, 0.0), cap, xtol=xtol)


def radial_arclength(eta0: float, eta: float) -> float:
    """Arclength along a meridian between eta0 and eta: ln(cosh eta/cosh eta0)."""
    return math.log(math.cosh(eta) / math.cosh(eta0))


def disk_energy(eta0: float, R: float, **kwargs) -> EnergyRow:
    """Bending energy of the geodesic disk of radius R centered at (eta0, 0)."""
    if R > max_disk_radius(eta0):
        # let the engine produce the boundary event with the attained radius,
        # keeping one error path for callers
        pass
    return _engine_disk_energy(chart(eta0), (eta0, 0.0), R, **kwargs)


def invariant_monitor(state0):
    """Conserved-quantity monitor cosh^2(eta) + (xi + C)^2 = D for a shot.

    ``state0`` = (eta, xi, deta/dt, dxi/dt) at launch; returns a callable
    mapping trajectory samples (eta, xi) to the drift of the combination.
    Undefined for meridian shots (dxi/dt = 0), which close the invariant at
    infinity.
    """
    eta0, xi0, de, dx = (float(q) for q in state0)
    if dx == 0.0:
        raise ValueError("invariant degenerates on meridian geodesics")
    off = -math.cosh(eta0) * math.sinh(eta0) * de / dx
    C = off - xi0
    D = math.cosh(eta0) ** 2 + off * off

    def drift(eta, xi):
        eta = np.asarray(eta, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return np.cosh(eta) ** 2 + (xi + C) ** 2 - D

    return drift


def parameter_mesh(eta_min: float, eta_max: float, n_eta: int,
                   xi_min: float, xi_max: float, n_xi: int) -> SurfaceMesh:
    """Closed-form lattice mesh over an (eta, xi) parameter rectangle."""
    if not 0 < eta_min < eta_max:
        raise ValueError("need 0 < eta_min < eta_max")
    eta = np.linspace(eta_min, eta_max, n_eta)
    xi = np.linspace(xi_min, xi_max, n_xi)
    verts = embed(eta[:, None], xi[None, :])
    phi = np.broadcast_to(generating_angle(eta)[:, None], (n_eta, n_xi)).copy()
    return SurfaceMesh(u=eta, v=xi, vertices=verts, phi=phi)
