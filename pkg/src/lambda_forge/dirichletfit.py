"""Fitting Dirichlet polynomials on admissible compacta.

Universality of Dirichlet series is a Baire-category statement and gives no
recipe for coefficients. What is done here is the finite-dimensional shadow:
for fixed N, choose a_1..a_N by regularized least squares so that
sum a_n n^-z tracks a target on a union of thin rectangles, and separately
measure how far the series strays from zeta on Re z > 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from . import kernels
from .errors import DomainError, IllConditioned
from .zeros import RectRegion

MAX_STRIP_WIDTH = 0.5
DEFAULT_GRID = 24
COND_LIMIT = 1e14
POINT_WEIGHT = 100.0


@dataclass(frozen=True)
class AdmissibleCompact:
    rects: tuple

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))


@dataclass(frozen=True)
class AdmissibleCheck:
    ok: bool
    violations: tuple

    def __bool__(self):
        return self.ok


def validate_admissible(k: AdmissibleCompact) -> AdmissibleCheck:
    bad = []
    for i, r in enumerate(k.rects):
        width = r.re_max - r.re_min
        if width >= MAX_STRIP_WIDTH:
            bad.append(f"rect {i}: width {width:g} is not below 1/2")
        if r.re_max > 1.0:
            bad.append(f"rect {i}: extends to Re z = {r.re_max:g} > 1")
    for i, r in enumerate(k.rects):
        for j in range(i + 1, len(k.rects)):
            s = k.rects[j]
            if r.re_min <= s.re_max and s.re_min <= r.re_max:
                bad.append(f"rects {i} and {j}: vertical strips intersect")
    return AdmissibleCheck(not bad, tuple(bad))


class DirichletPolynomial:
    """sum_{n=1}^N a_n n^-z."""

    def __init__(self, coeffs: Sequence[complex]):
        a = np.array(coeffs, dtype=np.complex128).ravel()
        if a.size < 1:
            raise DomainError("a Dirichlet polynomial needs at least one term")
        self.coeffs = a
        self.coeffs.setflags(write=False)
        self._logn = np.log(np.arange(1, a.size + 1, dtype=np.float64))

    @classmethod
    def ones(cls, n: int) -> "DirichletPolynomial":
        return cls(np.ones(n))

    @property
    def n_terms(self) -> int:
        return self.coeffs.size

    def __call__(self, z):
        arr = np.asarray(z, dtype=np.complex128)
        out = kernels.dirichlet_sum(self.coeffs, self._logn,
                                    np.ascontiguousarray(np.atleast_1d(arr).ravel()))
        return complex(out[0]) if arr.shape == () else out.reshape(arr.shape)

    def __repr__(self):
        return f"DirichletPolynomial(N={self.n_terms})"

    def to_dict(self) -> dict:
        return {"coeffs": [[c.real, c.imag] for c in self.coeffs]}


def rect_grid(r: RectRegion, n: int) -> np.ndarray:
    x = np.linspace(r.re_min, r.re_max, n)
    y = np.linspace(r.im_min, r.im_max, n)
    return (x[None, :] + 1j * y[:, None]).ravel()


def design_matrix(z: np.ndarray, n_terms: int) -> np.ndarray:
    logn = np.log(np.arange(1, n_terms + 1, dtype=np.float64))
    return np.exp(-np.outer(z, logn))


def _targets(target, k: AdmissibleCompact):
    if callable(target):
        return [target] * len(k.rects)
    target = list(target)
    if len(target) != len(k.rects):
        raise DomainError("need one target per rectangle")
    return target


@dataclass
class FitResult:
    poly: DirichletPolynomial
    sup_error: float
    sample_residual: float
    sample_rms: float
    condition: float
    n_samples: int
    n_validation: int

    def __iter__(self):
        return iter((self.poly, self.sup_error))

    def to_dict(self) -> dict:
        return {
            "n_terms": self.poly.n_terms,
            "sup_error": self.sup_error,
            "sample_residual": self.sample_residual,
            "sample_rms": self.sample_rms,
            "condition": self.condition,
            "n_samples": self.n_samples,
            "n_validation": self.n_validation,
            "coeffs": self.poly.to_dict()["coeffs"],
        }


def fit(target, k: AdmissibleCompact, n_terms: int, samples_per_rect: int = DEFAULT_GRID,
        ridge: float = 0.0, anchor: DirichletPolynomial | None = None,
        points: Sequence[tuple] = ()) -> FitResult:
    """Least-squares Dirichlet polynomial for ``target`` on ``k``.

    Minimizes mean |D(z) - target(z)|^2 over a uniform grid of
    ``samples_per_rect`` x ``samples_per_rect`` points per rectangle, plus
    ``ridge * |a - anchor|^2``. ``target`` is one callable or one per rectangle.
    ``points`` holds extra (z, value) constraints, each weighted 100 times a
    grid point. The error is validated on the nested grid with 2n - 1 points
    per axis, which contains the fitting grid.
    """
    check = validate_admissible(k)
    if not check:
        raise DomainError("compact is not admissible: " + "; ".join(check.violations))
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    if samples_per_rect < 2:
        raise DomainError("need at least 2 samples per axis")
    if ridge < 0:
        raise DomainError("ridge must be non-negative")
    anchor_c = np.ones(n_terms, dtype=np.complex128)
    if anchor is not None:
        if anchor.n_terms != n_terms:
            raise DomainError("anchor must have n_terms coefficients")
        anchor_c = np.asarray(anchor.coeffs)
    fns = _targets(target, k)

    zs, ys = [], []
    for r, fn in zip(k.rects, fns):
        z = rect_grid(r, samples_per_rect)
        zs.append(z)
        ys.append(np.asarray(fn(z), dtype=np.complex128))
    z = np.concatenate(zs)
    y = np.concatenate(ys)
    m = z.size
    w = np.full(m, 1.0 / np.sqrt(m))
    if points:
        pz = np.array([complex(p) for p, _ in points])
        pv = np.array([complex(v) for _, v in points])
        z = np.concatenate([z, pz])
        y = np.concatenate([y, pv])
        w = np.concatenate([w, np.full(pz.size, np.sqrt(POINT_WEIGHT / m))])

    a_mat = design_matrix(z, n_terms) * w[:, None]
    rhs = y * w
    if ridge > 0:
        a_mat = np.vstack([a_mat, np.sqrt(ridge) * np.eye(n_terms)])
        rhs = np.concatenate([rhs, np.sqrt(ridge) * anchor_c])
    q, r, perm = scipy.linalg.qr(a_mat, mode="economic", pivoting=True)
    sv = np.linalg.svd(r, compute_uv=False)
    # condition of the normal system is the square of that of R
    cond = float(np.inf if sv[-1] == 0 else (sv[0] / sv[-1]) ** 2)
    if not cond <= COND_LIMIT:
        raise IllConditioned(f"normal system condition {cond:.3g} exceeds {COND_LIMIT:g}; increase ridge")
    coef = np.empty(n_terms, dtype=np.complex128)
    coef[perm] = scipy.linalg.solve_triangular(r, q.conj().T @ rhs)
    d = DirichletPolynomial(coef)

    grid_err = np.abs(d(np.concatenate(zs)) - np.concatenate(ys))
    sample_res = float(grid_err.max())
    sample_rms = float(np.sqrt(np.mean(grid_err ** 2)))
    sup = 0.0
    n_val = 0
    for r_, fn in zip(k.rects, fns):
        zv = rect_grid(r_, 2 * samples_per_rect - 1)
        n_val += zv.size
        sup = max(sup, float(np.max(np.abs(d(zv) - np.asarray(fn(zv), dtype=np.complex128)))))
    return FitResult(d, sup, sample_res, sample_rms, cond, m, n_val)


@dataclass(frozen=True)
class HalfplaneDeviation:
    sampled: float
    certified_bound: float
    delta: float

    @property
    def passed(self) -> bool:
        return self.certified_bound < self.delta

    def to_dict(self) -> dict:
        return {"sampled": self.sampled, "certified_bound": self.certified_bound,
                "delta": self.delta, "pass": self.passed}


def halfplane_deviation(d: DirichletPolynomial, delta: float, samples: int = 512,
                        t_max: float = 100.0) -> HalfplaneDeviation:
    """Deviation of D from zeta on Re z >= 1 + delta.

    The difference there is sum (a_n - 1) n^-z, bounded in modulus by
    sum |a_n - 1| n^-(1 + delta); the sampled maximum along the line
    Re z = 1 + delta and a sparse grid further right is reported alongside.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    diff = DirichletPolynomial(np.asarray(d.coeffs) - 1.0)
    n = np.arange(1, d.n_terms + 1, dtype=np.float64)
    bound = float(np.sum(np.abs(diff.coeffs) * n ** -(1.0 + delta)))
    t = np.linspace(-t_max, t_max, samples)
    line = (1.0 + delta) + 1j * t
    deep = (np.array([1.0 + 2 * delta, 1.0 + 4 * delta, 2.0, 3.0])[:, None]
            + 1j * t[:: max(1, samples // 32)][None, :]).ravel()
    sampled = float(np.max(np.abs(diff(np.concatenate([line, deep])))))
    return HalfplaneDeviation(sampled, bound, float(delta))
