"""One-parameter family of K = -1 surfaces of revolution with wavy profiles.

Each member is labeled by a modulus b in (0, 1).  Chart coordinates are
(eta, xi) with eta the profile parameter and xi the unwound revolution
angle; the metric is diag(b^4 sn^2, dn^2) built from Jacobi functions of
parameter m = b^4.  The chart degenerates where sn vanishes, i.e. where the
Jacobi amplitude reaches 0 or pi; the widest smooth band is centered at
eta0 = K(b^4), where the angle between asymptotic directions is smallest.
As b -> 1 the family limits onto the pseudosphere.

The modulus can be calibrated so a geodesic disk of radius R fits with the
slowest possible opening of the generating angle: b = sqrt(cos(eps/2)) with
eps the pendulum turning angle for lam = R^2.
"""

from __future__ import annotations

import math

import numpy as np

from .chebyshev import SurfaceMesh
from .elliptic import complete_K, incomplete_E, incomplete_F, jacobi
from .geodesics import (EnergyRow, SurfaceChart, disk_energy as _engine_disk_energy,
                        max_disk_radius_shooting)
from .pendulum import solve_eps

DEFAULT_AM_FLOOR = 1e-6


def _check_modulus(b: float) -> float:
    b = float(b)
    if not 0.0 < b < 1.0:
        raise ValueError(f"modulus b must lie in (0, 1), got {b!r}")
    return b


def eps_from_modulus(b: float) -> float:
    """Smallest opening angle of the family member: eps = 2 arccos(b^2)."""
    return 2.0 * math.acos(_check_modulus(b) ** 2)


def modulus_from_eps(eps: float) -> float:
    """Inverse calibration b = sqrt(cos(eps/2)) for eps in (0, pi)."""
    if not 0.0 < eps < math.pi:
        raise ValueError("eps must lie in (0, pi)")
    return math.sqrt(math.cos(0.5 * eps))


def modulus_from_radius(R: float) -> tuple[float, float]:
    """Travel-time calibration: (eps, b) with T(eps; R^2) = 1, b = sqrt(cos(eps/2)).

    This is the opening angle of the slowest admissible diagonal profile on
    the square of side R, the kernel shared with the curvature lower bound.
    It is *not* the modulus that fits a geodesic disk of radius R: for
    R >~ 1.1 the resulting surface is too short by a finite margin (use
    ``modulus_for_max_radius`` for disks that just fit).
    """
    if R <= 0.0:
        raise ValueError("R must be positive")
    eps = solve_eps(R * R)
    return eps, modulus_from_eps(eps)


def modulus_for_max_radius(R: float) -> float:
    """Modulus of the family member whose largest geodesic disk has radius R.

    Inverse of ``max_disk_radius``: b = sqrt(tanh R).
    """
    if R <= 0.0:
        raise ValueError("R must be positive")
    return math.sqrt(math.tanh(R))


def center_eta(b: float) -> float:
    """Profile parameter of the waist (widest smooth band): K(b^4)."""
    return complete_K(_check_modulus(b) ** 4)


def generating_angle(eta, b: float):
    """Angle between asymptotic directions: phi = 2 arccos(b^2 sn(eta | b^4))."""
    m = _check_modulus(b) ** 4
    sn = jacobi(np.asarray(eta, dtype=float), m).sn
    return 2.0 * np.arccos(np.clip(b * b * sn, -1.0, 1.0))


def embed(eta, xi, b: float):
    """Embedding (dn cos(b^2 xi), dn sin(b^2 xi), eta - E(am | b^4)) / b^2."""
    b = _check_modulus(b)
    m = b ** 4
    eta = np.asarray(eta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    trip = jacobi(eta, m)
    z = eta - incomplete_E(trip.am, m)
    ang = b * b * xi
    parts = np.broadcast_arrays(trip.dn * np.cos(ang), trip.dn * np.sin(ang), z)
    return np.stack(parts, axis=-1) / (b * b)


def metric(eta, xi, b: float):
    """Diagonal metric (b^4 sn^2, 0, dn^2) at parameter m = b^4."""
    m = _check_modulus(b) ** 4
    trip = jacobi(np.asarray(eta, dtype=float), m)
    g11 = m * trip.sn * trip.sn
    return g11, np.zeros_like(g11), trip.dn * trip.dn


def christoffel(eta, xi, b: float):
    """Christoffel symbols of the (eta, xi) chart (derived from the metric)."""
    m = _check_modulus(b) ** 4
    trip = jacobi(np.asarray(eta, dtype=float), m)
    ratio = trip.cn * trip.dn / trip.sn
    zero = np.zeros_like(ratio)
    return ratio, zero, zero, -m * trip.sn * trip.cn / trip.dn, ratio, zero


def density(eta, xi, b: float):
    """Bending density k1^2 + k2^2 with k1^2 = dn^2 / (b^4 sn^2)."""
    m = _check_modulus(b) ** 4
    trip = jacobi(np.asarray(eta, dtype=float), m)
    k1sq = trip.dn * trip.dn / (m * trip.sn * trip.sn)
    return k1sq + 1.0 / k1sq


def chart(b: float, am_floor: float = DEFAULT_AM_FLOOR) -> SurfaceChart:
    """Chart for the geodesic engine, guarded away from the sn = 0 rims.

    The domain margin is measured in the Jacobi amplitude, which unwinds
    monotonically in eta, so leaving the smooth band in either direction
    drives the margin negative.
    """
    b = _check_modulus(b)
    m = b ** 4

    def margin(eta, xi):
        am = jacobi(np.asarray(eta, dtype=float), m).am
        return np.minimum(am, math.pi - am) - am_floor

    return SurfaceChart(name="hyperboloid",
                        metric=lambda c1, c2: metric(c1, c2, b),
                        christoffel=lambda c1, c2: christoffel(c1, c2, b),
                        density=lambda c1, c2: density(c1, c2, b),
                        domain_margin=margin, param=b)


def max_disk_radius(b: float, am_floor: float = 0.0) -> float:
    """Largest geodesic disk radius about the waist.

    The blocking directions are the meridians: the disk first touches the
    guarded rim at amplitude ``am_floor`` (the true rim for am_floor = 0,
    where the value is arctanh(b^2)).
    """
    b = _check_modulus(b)
    m = b ** 4
    if am_floor == 0.0:
        return math.atanh(b * b)
    eta_f = incomplete_F(am_floor, m)
    trip = jacobi(float(eta_f), m)
    # meridian arclength: int b^2 sn = ln(dn - b^2 cn) between eta_f and K
    return math.log(math.sqrt(1.0 - m)) - math.log(trip.dn - b * b * trip.cn)


def max_disk_radius_by_shooting(b: float, *, xtol: float = 1e-7,
                                am_floor: float = DEFAULT_AM_FLOOR) -> float:
    """Shooting/boundary-event verification of the closed-form disk radius."""
    cap = 2.0 * max_disk_radius(b) + 1.0
    return max_disk_radius_shooting(chart(b, am_floor), (center_eta(b), 0.0),
                                    cap, xtol=xtol)


def disk_energy(b: float, R: float, **kwargs) -> EnergyRow:
    """Bending energy of the geodesic disk of radius R about the waist."""
    return _engine_disk_energy(chart(b), (center_eta(b), 0.0), R, **kwargs)


def clairaut_momentum(b: float, eta, dxi):
    """Conserved revolution momentum dn^2(eta | b^4) * dxi/dt along geodesics."""
    m = _check_modulus(b) ** 4
    dn = jacobi(np.asarray(eta, dtype=float), m).dn
    return dn * dn * np.asarray(dxi, dtype=float)


def parameter_mesh(b: float, eta_min: float, eta_max: float, n_eta: int,
                   xi_min: float, xi_max: float, n_xi: int) -> SurfaceMesh:
    """Closed-form lattice mesh over an (eta, xi) parameter rectangle."""
    b = _check_modulus(b)
    if not 0.0 < eta_min < eta_max < 2.0 * center_eta(b):
        raise ValueError("eta range must stay inside one smooth band "
                         "(0, 2 K(b^4))")
    eta = np.linspace(eta_min, eta_max, n_eta)
    xi = np.linspace(xi_min, xi_max, n_xi)
    verts = embed(eta[:, None], xi[None, :], b)
    phi = np.broadcast_to(generating_angle(eta, b)[:, None], (n_eta, n_xi)).copy()
    return SurfaceMesh(u=eta, v=xi, vertices=verts, phi=phi)
