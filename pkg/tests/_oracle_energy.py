"""Independent Monte-Carlo bending-energy oracle.

Re-derives disk energies with none of the package machinery: geodesics are
marched with a hand-rolled fixed-step RK4 on hand-typed ODE right-hand
sides, Jacobi functions come from scipy.special.ellipj, and the integral

    B = int_0^{2pi} int_0^R sinh(r) * density dr dPsi

is estimated by stratified Monte-Carlo sampling over (r, Psi).  Run as a
script to print the frozen reference values used in the tests.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ellipj


def _rk4_polar_rays(rhs, y0, R, n_steps):
    """March states (4, n_rays) to arclength R, storing the eta history."""
    h = R / n_steps
    y = y0.copy()
    eta_hist = np.empty((n_steps + 1, y0.shape[1]))
    eta_hist[0] = y[0]
    for k in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        eta_hist[k + 1] = y[0]
    return eta_hist


def _mc_energy(eta_hist, density_of_eta, R, rng, n_r):
    """Stratified MC estimate from per-ray eta histories."""
    n_steps = eta_hist.shape[0] - 1
    n_rays = eta_hist.shape[1]
    # stratified radii per ray, linear interpolation into the step history
    r = R * (np.arange(n_r)[:, None] + rng.random((n_r, n_rays))) / n_r
    pos = r / R * n_steps
    i0 = np.minimum(pos.astype(int), n_steps - 1)
    w = pos - i0
    cols = np.arange(n_rays)[None, :]
    eta = (1.0 - w) * eta_hist[i0, cols] + w * eta_hist[i0 + 1, cols]
    samples = np.sinh(r) * density_of_eta(eta)
    return 2.0 * math.pi * R * samples.mean()


def pseudosphere_disk_energy(eta0, R, n_rays=2000, n_r=500, n_steps=2400,
                             seed=20240818):
    """MC estimate of the pseudosphere disk energy about (eta0, 0)."""
    rng = np.random.default_rng(seed)
    psi = 2.0 * math.pi * (np.arange(n_rays) + rng.random(n_rays)) / n_rays
    # orthonormal start directions in the (eta, xi) chart, metric
    # diag(tanh^2, sech^2)
    d1 = np.cos(psi) / math.tanh(eta0)
    d2 = np.sin(psi) * math.cosh(eta0)
    y0 = np.vstack([np.full(n_rays, float(eta0)), np.zeros(n_rays), d1, d2])

    def rhs(y):
        eta, _, p1, p2 = y
        sh, ch = np.sinh(eta), np.cosh(eta)
        a1 = -(p1 * p1 + p2 * p2) / (sh * ch)
        a2 = 2.0 * (sh / ch) * p1 * p2
        return np.vstack([p1, p2, a1, a2])

    hist = _rk4_polar_rays(rhs, y0, R, n_steps)

    def density(eta):
        s2 = np.sinh(eta) ** 2
        return s2 + 1.0 / s2

    return _mc_energy(hist, density, R, rng, n_r)


def hyperboloid_disk_energy(b, R, n_rays=2000, n_r=500, n_steps=2400,
                            seed=20240819):
    """MC estimate of the disk energy about the waist of the modulus-b member."""
    from scipy.special import ellipk
    m = b ** 4
    eta0 = float(ellipk(m))
    rng = np.random.default_rng(seed)
    psi = 2.0 * math.pi * (np.arange(n_rays) + rng.random(n_rays)) / n_rays
    sn0, cn0, dn0, _ = ellipj(eta0, m)
    d1 = np.cos(psi) / (math.sqrt(m) * sn0)
    d2 = np.sin(psi) / dn0
    y0 = np.vstack([np.full(n_rays, eta0), np.zeros(n_rays), d1, d2])

    def rhs(y):
        eta, _, p1, p2 = y
        sn, cn, dn, _ = ellipj(eta, m)
        a1 = -(cn * dn / sn) * (p1 * p1 + p2 * p2)
        a2 = 2.0 * (m * sn * cn / dn) * p1 * p2
        return np.vstack([p1, p2, a1, a2])

    hist = _rk4_polar_rays(rhs, y0, R, n_steps)

    def density(eta):
        sn, cn, dn, _ = ellipj(eta, m)
        k1sq = dn * dn / (m * sn * sn)
        return k1sq + 1.0 / k1sq

    return _mc_energy(hist, density, R, rng, n_r)


if __name__ == "__main__":
    e_ps = pseudosphere_disk_energy(1.94, 1.2)
    print(f"pseudosphere eta0=1.94 R=1.2: {e_ps:.6f}")
    e_hb = hyperboloid_disk_energy(0.9233341812063035, 1.25)
    print(f"hyperboloid b=0.9233341812063035 R=1.25: {e_hb:.6f}")
