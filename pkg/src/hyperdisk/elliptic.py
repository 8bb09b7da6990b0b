"""Jacobi elliptic functions and Legendre integrals via AGM/Landen recursions.

Everything here works in the *parameter* convention: ``m`` is the quantity
appearing in dn^2 + m*sn^2 = 1 and in the integrands
1/sqrt(1 - m sin^2) and sqrt(1 - m sin^2).

The amplitude returned by :func:`jacobi` is the globally unfolded one — it
grows without bound in ``u`` (quasi-periodic, am(u + 2K) = am(u) + pi) — so
callers can sweep it through pi and beyond without branch surgery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

AGM_TOL = 1e-14
_MAX_ITER = 64


@dataclass(frozen=True)
class EllipticTriple:
    """Values sn(u|m), cn(u|m), dn(u|m) and the unfolded amplitude am(u|m)."""

    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float
    am: np.ndarray | float


def _check_parameter(m: float) -> float:
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"elliptic parameter m must lie in [0, 1], got {m!r}")
    return m


@lru_cache(maxsize=128)
def _agm_chain(m: float) -> tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]]:
    """Arithmetic-geometric mean sequences (a_n, b_n, c_n) down to c_N <= tol.

    Cached per parameter: geodesic integration evaluates the Jacobi triple
    tens of thousands of times at a fixed m.
    """
    a, b = 1.0, math.sqrt(1.0 - m)
    avals, bvals, cvals = [a], [b], [math.sqrt(m)]
    while cvals[-1] > AGM_TOL and len(avals) < _MAX_ITER:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        cvals.append(0.5 * (avals[-1] - bvals[-1]))
        avals.append(a)
        bvals.append(b)
    return tuple(avals), tuple(bvals), tuple(cvals)


def jacobi(u: np.ndarray | float, m: float) -> EllipticTriple:
    """Evaluate the Jacobi triple by the descending Landen back-recursion.

    ``u`` may be a scalar or an ndarray; ``m`` must be a scalar parameter in
    [0, 1].  The degenerate ends use their closed forms (circular / hyperbolic
    functions); dn is assembled as sqrt((1-m) + m*cn^2), which is free of
    cancellation and pins the dn^2 + m sn^2 = 1 identity to rounding error.
    """
    m = _check_parameter(m)
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0

    if m == 0.0:
        am = u_arr.copy()
        sn, cn, dn = np.sin(u_arr), np.cos(u_arr), np.ones_like(u_arr)
    elif m == 1.0:
        sn = np.tanh(u_arr)
        cn = dn = 1.0 / np.cosh(u_arr)
        am = np.arctan(np.sinh(u_arr))  # gudermannian
    else:
        avals, _, cvals = _agm_chain(m)
        n_last = len(avals) - 1
        if scalar:
            # plain-float path: the back-recursion is ~10 levels deep and
            # sits inside geodesic RHS callbacks, where ndarray scalar
            # overhead would dominate
            phi = math.ldexp(1.0, n_last) * avals[n_last] * float(u_arr)
            for n in range(n_last, 0, -1):
                ratio = cvals[n] / avals[n] * math.sin(phi)
                ratio = min(1.0, max(-1.0, ratio))
                phi = 0.5 * (phi + math.asin(ratio))
            sn, cn = math.sin(phi), math.cos(phi)
            return EllipticTriple(sn, cn, math.sqrt((1.0 - m) + m * cn * cn), phi)
        phi = math.ldexp(1.0, n_last) * avals[n_last] * u_arr
        for n in range(n_last, 0, -1):
            ratio = np.clip(cvals[n] / avals[n] * np.sin(phi), -1.0, 1.0)
            phi = 0.5 * (phi + np.arcsin(ratio))
        am = phi
        sn, cn = np.sin(am), np.cos(am)
        dn = np.sqrt((1.0 - m) + m * cn * cn)

    if scalar:
        return EllipticTriple(float(sn), float(cn), float(dn), float(am))
    return EllipticTriple(sn, cn, dn, am)


def _principal_atan_ratio(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """atan(y/x) on the principal branch, safe where x passes through 0."""
    t = np.arctan2(y, x)
    t = np.where(t > 0.5 * math.pi, t - math.pi, t)
    t = np.where(t < -0.5 * math.pi, t + math.pi, t)
    return t


def _ascending_phases(phi: np.ndarray, m: float):
    """Phase ladder phi_n of the ascending AGM transformation (A&S-style).

    Returns (phi_N, n_last, a_N, [(c_n, phi_n) for n >= 1], sum 2^(n-1) c_n^2).
    """
    avals, bvals, cvals = _agm_chain(m)
    n_last = len(avals) - 1
    csum = 0.5 * cvals[0] ** 2
    pairs = []
    p = np.asarray(phi, dtype=float)
    for n in range(n_last):
        p = p + math.pi * np.round(p / math.pi) + _principal_atan_ratio(
            bvals[n] * np.sin(p), avals[n] * np.cos(p))
        pairs.append((cvals[n + 1], p))
        csum += math.ldexp(cvals[n + 1] ** 2, n)
    return p, n_last, avals[n_last], pairs, csum


def incomplete_F(phi: np.ndarray | float, m: float) -> np.ndarray | float:
    """Legendre integral of the first kind, any real phi, parameter in [0, 1]."""
    m = _check_parameter(m)
    phi_arr = np.asarray(phi, dtype=float)
    scalar = phi_arr.ndim == 0
    if m == 0.0:
        out = phi_arr.copy()
    elif m == 1.0:
        # integrand 1/|cos| is non-integrable through pi/2: finite only inside
        inside = np.abs(phi_arr) < 0.5 * math.pi
        out = np.where(inside,
                       np.arctanh(np.sin(np.where(inside, phi_arr, 0.0))),
                       np.copysign(np.inf, phi_arr))
    else:
        p, n_last, a_last, _, _ = _ascending_phases(phi_arr, m)
        out = p / (math.ldexp(1.0, n_last) * a_last)
    return float(out) if scalar else out


def incomplete_E(phi: np.ndarray | float, m: float) -> np.ndarray | float:
    """Legendre integral of the second kind via the AGM companion sum."""
    m = _check_parameter(m)
    phi_arr = np.asarray(phi, dtype=float)
    scalar = phi_arr.ndim == 0
    if m == 0.0:
        out = phi_arr.copy()
    elif m == 1.0:
        # E(phi|1) accumulates 2 per half-turn of the amplitude
        k = np.round(phi_arr / math.pi)
        out = 2.0 * k + np.sin(phi_arr - math.pi * k)
    else:
        p, n_last, a_last, pairs, csum = _ascending_phases(phi_arr, m)
        f = p / (math.ldexp(1.0, n_last) * a_last)
        corr = np.zeros_like(p)
        for c_n, phi_n in pairs:
            corr = corr + c_n * np.sin(phi_n)
        out = (1.0 - csum) * f + corr
    return float(out) if scalar else out


def complete_K(m: float) -> float:
    """Quarter period K(m) = F(pi/2, m); infinite at m = 1."""
    m = _check_parameter(m)
    if m == 1.0:
        return math.inf
    avals, _, _ = _agm_chain(m)
    return 0.5 * math.pi / avals[-1]


def complete_E(m: float) -> float:
    """Complete integral of the second kind E(m)."""
    m = _check_parameter(m)
    if m == 1.0:
        return 1.0
    avals, _, cvals = _agm_chain(m)
    csum = sum(math.ldexp(c * c, n - 1) for n, c in enumerate(cvals))
    return 0.5 * math.pi / avals[-1] * (1.0 - csum)
