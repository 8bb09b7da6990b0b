"""Pendulum reduction of the sine-Gordon ansatz on the diagonal.

A profile psi(t) with psi'' = lam * sin(psi), psi(0) = psi(2) = pi - eps,
psi(1) = eps, psi'(1) = 0 exists exactly when the travel time from pi - eps
down to the turning angle eps equals 1:

    T(eps; lam) = int_eps^{pi-eps} dtheta / sqrt(2 lam (cos eps - cos theta)) = 1.

T is evaluated by adaptive quadrature after the substitution theta = eps + w^2
(which removes the inverse-square-root turning-point singularity), and eps is
found by bracketed bisection.  An independent shooting solver and a closed
form through the incomplete first-kind integral are provided as cross-checks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, solve_ivp

from .elliptic import complete_K, incomplete_F
from .errors import NoRootError

EPS_BRACKET = (1e-6, math.pi / 2 - 1e-6)
MAX_BISECT = 200


def time_of_flight(eps: float, lam: float) -> float:
    """Travel time of the pendulum from pi - eps down to its turning angle."""
    if not 0.0 < eps < math.pi / 2:
        raise ValueError("eps must lie in (0, pi/2)")
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    w_max = math.sqrt(math.pi - 2.0 * eps)
    sin_e, cos_e = math.sin(eps), math.cos(eps)

    def q(w):
        x = w * w
        if x > 1e-5:
            return (cos_e - math.cos(eps + x)) / x
        # series of (cos eps - cos(eps + x))/x around x = 0
        return sin_e + x * (cos_e / 2.0 - x * sin_e / 6.0)

    def integrand(w):
        return math.sqrt(2.0 / (lam * q(w)))

    out = quad(integrand, 0.0, w_max, epsabs=1e-13, epsrel=1e-12, limit=200,
               full_output=1)
    return out[0]


def time_of_flight_closed_form(eps: float, lam: float) -> float:
    """Identity route: T = [K(m) - F(arcsin(tan(eps/2)), m)]/sqrt(lam),
    with parameter m = cos^2(eps/2)."""
    m = math.cos(0.5 * eps) ** 2
    u = math.asin(math.tan(0.5 * eps))
    return (complete_K(m) - incomplete_F(u, m)) / math.sqrt(lam)


def solve_eps(lam: float, *, tol: float = 1e-12) -> float:
    """Turning angle eps with T(eps; lam) = 1, by bracketed bisection.

    Raises NoRootError when the bracket [1e-6, pi/2 - 1e-6] carries no sign
    change (lam too small: even the widest swing is too slow, or so large
    that eps would underflow the bracket).
    """
    lo, hi = EPS_BRACKET
    f_lo = time_of_flight(lo, lam) - 1.0
    f_hi = time_of_flight(hi, lam) - 1.0
    if f_lo < 0.0 or f_hi > 0.0:
        raise NoRootError(
            f"travel-time condition has no root for lam = {lam:g}: "
            f"T({lo:g}) = {f_lo + 1:.6g}, T({hi:.6g}) = {f_hi + 1:.6g}")
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        f_mid = time_of_flight(mid, lam) - 1.0
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def solve_eps_shooting(lam: float, *, tol: float = 1e-12) -> float:
    """Independent eps: integrate psi'' = lam sin psi from the turning point
    and bisect on the first-passage time of psi = pi - eps minus 1.

    First-passage (a terminal event) rather than endpoint matching keeps the
    solver honest for extreme lam, where the endpoint formulation admits
    spurious roots from trajectories that wrap several half-periods.
    """
    t_cap = 2.0

    def passage_gap(eps):
        def hit(t, y):
            return y[0] - (math.pi - eps)
        hit.terminal = True
        hit.direction = 1
        res = solve_ivp(lambda t, y: [y[1], lam * math.sin(y[0])],
                        (0.0, t_cap), [eps, 0.0], method="DOP853",
                        rtol=1e-12, atol=1e-14, events=hit)
        if res.t_events[0].size:
            return float(res.t_events[0][0]) - 1.0
        return t_cap - 1.0     # sign is all that matters beyond the cap

    lo, hi = EPS_BRACKET
    f_lo, f_hi = passage_gap(lo), passage_gap(hi)
    if f_lo < 0.0 or f_hi > 0.0:
        raise NoRootError(f"shooting bracket carries no root for lam = {lam:g}")
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if passage_gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def trajectory(lam: float, eps: float, n_samples: int = 201):
    """Symmetric swing psi(t) on [0, 2] through the turning point at t = 1.

    Returns (t, psi, dpsi) arrays sampled uniformly.
    """
    t_left = np.linspace(0.0, 1.0, n_samples // 2 + 1)
    res = solve_ivp(lambda t, y: [y[1], lam * math.sin(y[0])],
                    (0.0, 1.0), [eps, 0.0], method="DOP853",
                    rtol=1e-12, atol=1e-14, dense_output=True)
    y = res.sol(t_left)
    # left half runs backward in time from the turning point
    t = np.concatenate([1.0 - t_left[::-1], 1.0 + t_left[1:]])
    psi = np.concatenate([y[0][::-1], y[0][1:]])
    dpsi = np.concatenate([-y[1][::-1], y[1][1:]])
    return t, psi, dpsi


def energy_constant(lam: float, psi, dpsi) -> np.ndarray:
    """Conserved combination (psi')^2/2 + lam cos(psi) along a swing."""
    psi = np.asarray(psi, dtype=float)
    dpsi = np.asarray(dpsi, dtype=float)
    return 0.5 * dpsi * dpsi + lam * np.cos(psi)
