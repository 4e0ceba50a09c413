"""Special functions and completed L-functions.

Everything here accepts scalars or array-likes of complex numbers and
returns the same shape (a Python ``complex`` for scalar input). Poles are
reported by raising, never by returning infinities.

Completed functions grow or decay like ``exp(+-pi |Im s| / 4)``, so the
module also offers log-domain evaluation (:func:`loggamma`,
:func:`log_q_eval`, :func:`lambda_log`) for callers that only need phases
or signs far from the real axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import (
    AccuracyNotReached,
    DomainError,
    Overflow,
    PoleAtNonPositiveInteger,
    PoleAtOne,
)

LOG_DBL_MAX = math.log(np.finfo(float).max)


def _as_array(s):
    arr = np.asarray(s, dtype=np.complex128)
    return np.atleast_1d(arr).ravel(), arr.shape


def _restore(values, shape):
    if shape == ():
        return complex(values[0])
    return values.reshape(shape)


# --------------------------------------------------------------------------
# Gamma

def _check_gamma_poles(z):
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if bad.any():
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {z[bad][0].real:g}")


def _log_sin_pi(z):
    # log(sin(pi z)), stable for large |Im z|
    out = np.empty_like(z)
    big = np.abs(z.imag) > 30.0
    small = ~big
    out[small] = np.log(np.sin(np.pi * z[small]))
    if big.any():
        zb = z[big]
        sgn = np.sign(zb.imag)
        # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; keep the dominant term
        w = -1j * sgn * np.pi * zb
        corr = np.log1p(-np.exp(-2 * w))
        out[big] = w + corr - np.log(-2j * sgn)
    return out


def loggamma(s):
    """A branch of log Gamma(s) (not necessarily the principal one).

    Lanczos (g=7, 9 terms) for Re s >= 1/2, reflection otherwise.
    """
    z, shape = _as_array(s)
    _check_gamma_poles(z)
    out = np.empty_like(z)
    right = z.real >= 0.5
    if right.any():
        out[right] = kernels.lanczos_loggamma(np.ascontiguousarray(z[right]))
    left = ~right
    if left.any():
        zl = z[left]
        out[left] = (math.log(math.pi) - _log_sin_pi(zl)
                     - kernels.lanczos_loggamma(np.ascontiguousarray(1.0 - zl)))
    return _restore(out, shape)


def _exp_checked(logv, what):
    logv = np.asarray(logv)
    if np.any(logv.real > LOG_DBL_MAX):
        raise Overflow(f"{what} exceeds double range")
    return np.exp(logv)


def gamma(s):
    """Complex Gamma function; relative error ~1e-13 for |s| <= 50."""
    z, shape = _as_array(s)
    return _restore(_exp_checked(loggamma(z), "Gamma"), shape)


# --------------------------------------------------------------------------
# Zeta family

@dataclass(frozen=True)
class EvalParams:
    em_terms: int = 64
    em_bernoulli: int = 12
    # truncation tolerance; compared against max(1, |value|) * target_abs_tol
    target_abs_tol: float = 1e-12

    def __post_init__(self):
        if self.em_terms < 8:
            raise DomainError("em_terms must be >= 8")
        if not 1 <= self.em_bernoulli <= 30:
            raise DomainError("em_bernoulli must lie in [1, 30]")
        if not self.target_abs_tol > 0:
            raise DomainError("target_abs_tol must be positive")


DEFAULT_PARAMS = EvalParams()


def _hurwitz_raw(z, a, params, regular=False):
    az = np.ceil(np.abs(z))
    # left of Re s = 0 the terms n^-s grow like N^(1-Re s) and cancel against the
    # tail; a short direct sum keeps the rounding small while the Bernoulli
    # corrections still converge (they need N of order |s|/2pi)
    short = np.maximum(8, np.ceil(0.6 * az) + params.em_terms // 16)
    nterms = np.where(z.real < 0, short, params.em_terms + az).astype(np.int64)
    coeffs = kernels.EM_COEFFS[: params.em_bernoulli + 1]
    val, err = kernels.hurwitz_em(np.ascontiguousarray(z), float(a), nterms, coeffs, regular)
    bad = err > params.target_abs_tol * np.maximum(1.0, np.abs(val))
    if bad.any():
        i = int(np.argmax(bad))
        raise AccuracyNotReached(
            f"Euler-Maclaurin remainder {err[i]:.3g} at s={z[i]} exceeds tolerance; "
            "raise em_terms or em_bernoulli")
    return val


def hurwitz_zeta(s, a: float, params: EvalParams = DEFAULT_PARAMS):
    if not 0.0 < a <= 1.0:
        raise DomainError(f"Hurwitz parameter a={a} outside (0, 1]")
    z, shape = _as_array(s)
    if np.any(z == 1.0):
        raise PoleAtOne("Hurwitz zeta has a pole at s=1")
    return _restore(_hurwitz_raw(z, a, params), shape)


def zeta(s, params: EvalParams = DEFAULT_PARAMS):
    """Riemann zeta by Euler-Maclaurin; valid on C minus {1}."""
    z, shape = _as_array(s)
    if np.any(z == 1.0):
        raise PoleAtOne("zeta has a pole at s=1")
    return _restore(_hurwitz_raw(z, 1.0, params), shape)


@dataclass(frozen=True)
class DirichletCharacter:
    """Real Dirichlet character given by its value table on residues 0..d-1."""

    modulus: int
    values: tuple

    def __post_init__(self):
        d = self.modulus
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if d < 1 or len(vals) != d:
            raise DomainError("value table length must equal the modulus")
        for r, v in enumerate(vals):
            if v not in (-1, 0, 1):
                raise DomainError("only real characters are supported")
            if (v == 0) != (math.gcd(r, d) > 1):
                raise DomainError(f"chi({r}) must vanish iff gcd({r},{d}) > 1")
        for r in range(d):
            for t in range(d):
                if vals[(r * t) % d] != vals[r] * vals[t]:
                    raise DomainError("character is not multiplicative")

    @classmethod
    def principal(cls, d: int = 1) -> "DirichletCharacter":
        return cls(d, tuple(1 if math.gcd(r, d) == 1 else 0 for r in range(d)))

    @classmethod
    def kronecker(cls, disc: int) -> "DirichletCharacter":
        """The real character n -> (disc/n) of modulus |disc|."""
        d = abs(disc)
        return cls(d, tuple(_kronecker(disc, r) for r in range(d)))

    @property
    def parity_delta(self) -> int:
        if self.modulus == 1:
            return 0
        return (1 - self.values[self.modulus - 1]) // 2

    @property
    def is_principal(self) -> bool:
        return all(v == (1 if math.gcd(r, self.modulus) == 1 else 0)
                   for r, v in enumerate(self.values))

    def __call__(self, n: int) -> int:
        return self.values[n % self.modulus]


def _kronecker(a: int, n: int) -> int:
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def dirichlet_l(chi: DirichletCharacter, s, params: EvalParams = DEFAULT_PARAMS):
    """L(s, chi) = d^{-s} sum_r chi(r) zeta(s, r/d)."""
    z, shape = _as_array(s)
    d = chi.modulus
    principal = chi.is_principal
    if principal and np.any(z == 1.0):
        raise PoleAtOne("principal L-function has a pole at s=1")
    # non-principal: sum chi(r) = 0, so the 1/(s-1) parts cancel exactly
    acc = np.zeros_like(z)
    for r in range(1, d + 1):
        c = chi(r)
        if c:
            acc += c * _hurwitz_raw(z, r / d, params, regular=not principal)
    if d > 1:
        acc *= np.exp(-z * math.log(d))
    return _restore(acc, shape)


# --------------------------------------------------------------------------
# Q-factors and completed functions

@dataclass(frozen=True)
class QFactor:
    """const * k^s * prod_j Gamma(lambda_j s + mu_j)."""

    k: float = 1.0
    factors: tuple = ()
    const: float = 1.0

    def __post_init__(self):
        facs = tuple((float(lam), complex(mu)) for lam, mu in self.factors)
        object.__setattr__(self, "factors", facs)
        if not self.k > 0:
            raise DomainError("Q-factor constant k must be positive")
        if not self.const > 0:
            raise DomainError("Q-factor prefactor must be positive")
        for lam, mu in facs:
            if not lam > 0:
                raise DomainError("every lambda_j must be positive")
            if mu.real < 0:
                raise DomainError("every mu_j must have non-negative real part")


def riemann_q() -> QFactor:
    return QFactor(k=1.0 / math.sqrt(math.pi), factors=((0.5, 0.0),))


def dirichlet_q(chi: DirichletCharacter) -> QFactor:
    """(d/pi)^{(s+delta)/2} Gamma((s+delta)/2)."""
    ratio = chi.modulus / math.pi
    delta = chi.parity_delta
    return QFactor(k=math.sqrt(ratio), factors=((0.5, delta / 2),),
                   const=ratio ** (delta / 2))


def log_q_eval(q: QFactor, s):
    z, shape = _as_array(s)
    out = math.log(q.const) + z * math.log(q.k)
    for lam, mu in q.factors:
        out = out + loggamma(lam * z + mu)
    return _restore(np.asarray(out, dtype=np.complex128), shape)


def q_eval(q: QFactor, s):
    z, shape = _as_array(s)
    return _restore(_exp_checked(log_q_eval(q, z), "Q-factor"), shape)


@dataclass(frozen=True)
class FunctionalEquation:
    """Lambda(s) = sign * R(Lambda(1-s)); R is conj-reflection when ``conjugated``."""

    q: QFactor = field(default_factory=riemann_q)
    sign: int = 1
    conjugated: bool = False

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError("functional-equation sign must be +1 or -1")


Evaluable = Callable[[np.ndarray], np.ndarray]


def lambda_eval(f: Evaluable, eq: FunctionalEquation, s):
    """Completed value Q(s) f(s)."""
    z, shape = _as_array(s)
    fz = np.asarray(f(z), dtype=np.complex128)
    out = np.exp(log_q_eval(eq.q, z)) * fz
    if not np.all(np.isfinite(out)):
        raise Overflow("completed value exceeds double range")
    return _restore(out, shape)


def lambda_log(f, eq: FunctionalEquation, s):
    """A branch of log(Q(s) f(s)); uses ``f.log_eval`` when f provides it."""
    z, shape = _as_array(s)
    if hasattr(f, "log_eval"):
        lf = np.asarray(f.log_eval(z), dtype=np.complex128)
    else:
        with np.errstate(divide="ignore"):
            lf = np.log(np.asarray(f(z), dtype=np.complex128))
    return _restore(log_q_eval(eq.q, z) + lf, shape)


def fe_residual(f: Evaluable, eq: FunctionalEquation, s):
    """|Lambda(s) - sign R(Lambda(1-s))| / (1 + |Lambda(s)|)."""
    z, shape = _as_array(s)
    lam = np.asarray(lambda_eval(f, eq, z))
    if eq.conjugated:
        other = np.conj(np.asarray(lambda_eval(f, eq, np.conj(1.0 - z))))
    else:
        other = np.asarray(lambda_eval(f, eq, 1.0 - z))
    res = np.abs(lam - eq.sign * other) / (1.0 + np.abs(lam))
    if shape == ():
        return float(res[0])
    return res.reshape(shape)


def zeta_fn(params: EvalParams = DEFAULT_PARAMS) -> Evaluable:
    return lambda s: zeta(s, params)


def dirichlet_fn(chi: DirichletCharacter, params: EvalParams = DEFAULT_PARAMS) -> Evaluable:
    return lambda s: dirichlet_l(chi, s, params)


def grid(re_range: Sequence[float], im_range: Sequence[float], n_re: int, n_im: int,
         exclude: Sequence[tuple] = ()) -> np.ndarray:
    """Flattened rectangular sample grid, dropping points within any (center, radius)."""
    xs = np.linspace(re_range[0], re_range[1], n_re)
    ys = np.linspace(im_range[0], im_range[1], n_im)
    pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    keep = np.ones(pts.size, dtype=bool)
    for center, radius in exclude:
        keep &= np.abs(pts - center) > radius
    return pts[keep]
