"""Reference values for the test suite, computed with mpmath at 30 digits.

    python scripts/compute_oracles.py > tests/data/oracles.json

Nothing here imports lambda_forge, except the least-squares fit baseline,
which re-solves the same sampled problem with an SVD (an independent solver)
to obtain the regression bound for the zeta fit.
"""
import json

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def c(z):
    z = mp.mpc(z)
    return [float(z.real), float(z.imag)]


def boundary_max(radius, m):
    best = mp.mpf(0)
    for k in range(m):
        s = mp.mpf("0.5") + radius * mp.expjpi(mp.mpf(2 * k) / m)
        best = max(best, abs(mp.zeta(s)))
    return float(best)


def chi_m4(n):
    return [0, 1, 0, -1][n % 4]


def fit_baseline():
    from lambda_forge import complexfn as cf
    x = np.linspace(0.1, 0.4, 24)
    y = np.linspace(2.0, 3.0, 24)
    z = (x[None, :] + 1j * y[:, None]).ravel()
    n = np.arange(1, 301, dtype=float)
    a = np.exp(-np.outer(z, np.log(n))) / np.sqrt(z.size)
    rhs = cf.zeta(z) / np.sqrt(z.size)
    lam = 1e-8
    u, sv, vh = np.linalg.svd(a, full_matrices=False)
    # ridge towards all-ones: a = 1 + V diag(s/(s^2+lam)) U^H (rhs - A 1)
    r = rhs - a @ np.ones(300)
    coef = 1.0 + vh.conj().T @ ((sv / (sv ** 2 + lam)) * (u.conj().T @ r))
    xv = np.linspace(0.1, 0.4, 47)
    yv = np.linspace(2.0, 3.0, 47)
    zv = (xv[None, :] + 1j * yv[:, None]).ravel()
    vals = np.exp(-np.outer(zv, np.log(n))) @ coef
    return float(np.max(np.abs(vals - cf.zeta(zv))))


def main():
    out = {
        "gamma_1_plus_i": c(mp.gamma(mp.mpc(1, 1))),
        "gamma_half": float(mp.gamma(0.5)),
        "zeta_2": float(mp.zeta(2)),
        "zeta_minus_1": float(mp.zeta(-1)),
        "zeta_3": float(mp.zeta(3)),
        "hurwitz_2_half": float(mp.zeta(2, 0.5)),
        "hurwitz_3_quarter": float(mp.zeta(3, 0.25)),
        "zeta_samples": {f"{re},{im}": c(mp.zeta(mp.mpc(re, im)))
                         for re, im in [(0.5, 10.0), (-2.0, 30.0), (2.5, -7.0), (0.3, 2.0),
                                        (-1.5, 0.5), (3.0, 55.0), (-4.0, 3.0),
                                        (-2.0, 60.0)]},
        "catalan": float(mp.catalan),
        "l_mod4_half_plus_i": c(mp.dirichlet(mp.mpc(0.5, 1.0), [0, 1, 0, -1])),
        "q_mod4_at_half": float((4 / mp.pi) ** mp.mpf("0.75") * mp.gamma(mp.mpf("0.75"))),
        "zeta_zero_heights": [float(mp.zetazero(k).imag) for k in range(1, 5)],
        "zeta_boundary_max_r2_m8192": boundary_max(2, 8192),
        "zeta_fit_sup_error_n300_ridge1e-8": fit_baseline(),
    }
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
