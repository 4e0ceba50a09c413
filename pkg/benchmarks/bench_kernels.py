"""Numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--size N] [--repeat R] [--json FILE]

Each pair is run once to warm up (numba compiles, or loads its cache, on
first call), then timed with timeit; the best of R runs is reported together
with the largest difference between the two outputs.
"""
import argparse
import json
import timeit

import numpy as np

from lambda_forge import kernels


def cases(size, rng):
    z = rng.uniform(0.5, 30.0, size) + 1j * rng.uniform(-40.0, 40.0, size)
    s = rng.uniform(-3.0, 4.0, size) + 1j * rng.uniform(-40.0, 40.0, size)
    # same term count as the library: a short direct sum left of Re s = 0
    az = np.ceil(np.abs(s))
    nterms = np.where(s.real < 0, np.maximum(8, np.ceil(0.6 * az) + 4), 64 + az).astype(np.int64)
    coeffs = np.ascontiguousarray(kernels.EM_COEFFS[:13])
    poly = rng.normal(size=120) + 1j * rng.normal(size=120)
    u = rng.uniform(-2.0, 2.0, size) + 1j * rng.uniform(-2.0, 2.0, size)
    dcoef = rng.normal(size=300) + 0j
    logn = np.log(np.arange(1, 301, dtype=np.float64))
    w = rng.uniform(0.1, 0.4, size) + 1j * rng.uniform(2.0, 3.0, size)
    return {
        "lanczos_loggamma": (kernels.nb_lanczos_loggamma, kernels.np_lanczos_loggamma, (z,)),
        "hurwitz_em": (lambda *a: kernels.nb_hurwitz_em(*a)[0],
                       lambda *a: kernels.np_hurwitz_em(*a)[0], (s, 0.25, nterms, coeffs)),
        "horner": (kernels.nb_horner, kernels.np_horner, (poly, u)),
        "dirichlet_sum": (kernels.nb_dirichlet_sum, kernels.np_dirichlet_sum, (dcoef, logn, w)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'kernel':<18} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8} {'max |diff|':>11}")
    for name, (nb_fn, np_fn, a) in cases(args.size, rng).items():
        ref = np_fn(*a)
        diff = float(np.max(np.abs(nb_fn(*a) - ref) / (1.0 + np.abs(ref))))
        t_nb = min(timeit.repeat(lambda: nb_fn(*a), number=1, repeat=args.repeat)) * 1e3
        t_np = min(timeit.repeat(lambda: np_fn(*a), number=1, repeat=args.repeat)) * 1e3
        rows.append({"kernel": name, "numba_ms": t_nb, "numpy_ms": t_np,
                     "speedup": t_np / t_nb, "max_rel_diff": diff})
        print(f"{name:<18} {t_nb:>10.3f} {t_np:>10.3f} {t_np / t_nb:>8.2f} {diff:>11.2e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"size": args.size, "results": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
