"""Reflection operators and the four-fold symmetric product.

Polynomials are stored in powers of ``(z - center)``. With the default
center 1/2 the reflection z -> 1 - z is an exact sign flip on odd
coefficients and z -> conj(z) is coefficient conjugation, so symmetry of the
four-fold product can be asserted coefficient by coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels

CRITICAL_CENTER = 0.5


class Polynomial:
    """Complex polynomial sum_k coeffs[k] * (z - center)^k."""

    __slots__ = ("coeffs", "center")

    def __init__(self, coeffs: Iterable[complex], center: complex = CRITICAL_CENTER):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=np.complex128).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=np.complex128)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        self.coeffs = c
        self.center = complex(center)
        self.coeffs.setflags(write=False)

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value: complex, center: complex = CRITICAL_CENTER) -> "Polynomial":
        return cls([value], center)

    @classmethod
    def from_roots(cls, roots: Sequence[complex], center: complex = CRITICAL_CENTER) -> "Polynomial":
        c = np.ones(1, dtype=np.complex128)
        for r in roots:
            c = np.convolve(c, [center - r, 1.0])
        return cls(c, center)

    @classmethod
    def identity(cls, center: complex = CRITICAL_CENTER) -> "Polynomial":
        """The polynomial z."""
        return cls([center, 1.0], center)

    # basic queries ------------------------------------------------------
    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        arr = np.asarray(z, dtype=np.complex128)
        u = np.atleast_1d(arr).ravel() - self.center
        out = kernels.horner(self.coeffs, np.ascontiguousarray(u))
        if arr.shape == ():
            return complex(out[0])
        return out.reshape(arr.shape)

    def __repr__(self):
        return f"Polynomial(degree={self.degree}, center={self.center!r})"

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other if other.center == self.center else other.recenter(self.center)
        return Polynomial.constant(complex(other), self.center)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.coeffs * complex(other), self.center)
        o = self._coerce(other)
        return Polynomial(np.convolve(self.coeffs, o.coeffs), self.center)

    __rmul__ = __mul__

    def __add__(self, other):
        o = self._coerce(other)
        n = max(self.coeffs.size, o.coeffs.size)
        c = np.zeros(n, dtype=np.complex128)
        c[: self.coeffs.size] += self.coeffs
        c[: o.coeffs.size] += o.coeffs
        return Polynomial(c, self.center)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs, self.center)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, n: int):
        out = Polynomial.constant(1.0, self.center)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # calculus -----------------------------------------------------------
    def deriv(self, m: int = 1) -> "Polynomial":
        c = self.coeffs
        for _ in range(m):
            if c.size <= 1:
                return Polynomial.constant(0.0, self.center)
            c = c[1:] * np.arange(1, c.size)
        return Polynomial(c, self.center)

    def recenter(self, new_center: complex) -> "Polynomial":
        """Same polynomial expanded about ``new_center`` (repeated synthetic division)."""
        new_center = complex(new_center)
        shift = new_center - self.center
        if shift == 0:
            return self
        c = self.coeffs.copy()
        n = c.size
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] += shift * c[j + 1]
        return Polynomial(c, new_center)

    def _keep_center(self, center: complex) -> "Polynomial":
        return self if self.center == center else self.recenter(center)

    def taylor(self, z0: complex, m: int) -> np.ndarray:
        """p^{(j)}(z0) / j! for j = 0..m-1."""
        c = self.recenter(z0).coeffs
        out = np.zeros(m, dtype=np.complex128)
        out[: min(m, c.size)] = c[:m]
        return out

    def derivatives(self, z0: complex, m: int) -> np.ndarray:
        """p^{(j)}(z0) for j = 0..m-1."""
        t = self.taylor(z0, m)
        fact = np.cumprod(np.r_[1.0, np.arange(1, m)])[:m]
        return t * fact

    def coeff_abs_sum(self, radius: float) -> float:
        """sum_k |c_k| radius^k, an upper bound for |p| on |z-center| <= radius."""
        return float(np.sum(np.abs(self.coeffs) * radius ** np.arange(self.coeffs.size)))

    def to_dict(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Polynomial":
        return cls([complex(a, b) for a, b in d["coeffs"]], complex(*d["center"]))


# --------------------------------------------------------------------------

def reflect_point(s: complex) -> complex:
    return 1.0 - s


@dataclass(frozen=True)
class SymmetryOrbit:
    seed: complex
    points: tuple

    def __len__(self):
        return len(self.points)

    def __contains__(self, z):
        return complex(z) in self.points

    def __iter__(self):
        return iter(self.points)


def orbit(a: complex) -> SymmetryOrbit:
    a = complex(a)
    pts = []
    for z in (a, 1.0 - a, a.conjugate(), 1.0 - a.conjugate()):
        if z not in pts:
            pts.append(z)
    return SymmetryOrbit(a, tuple(pts))


def conj_flip(p: Polynomial) -> Polynomial:
    """z -> conj(p(conj z))."""
    return Polynomial(np.conj(p.coeffs), p.center.conjugate())._keep_center(p.center)


def point_flip(p: Polynomial) -> Polynomial:
    """z -> p(1 - z)."""
    signs = (-1.0) ** np.arange(p.coeffs.size)
    return Polynomial(p.coeffs * signs, 1.0 - p.center)._keep_center(p.center)


def four_fold(p: Polynomial) -> Polynomial:
    """p(s) conj(p(conj s)) p(1-s) conj(p(1-conj s))."""
    q = p * conj_flip(p)
    return q * point_flip(q)


def coefficient_asymmetry(p: Polynomial) -> float:
    """Largest coefficient change under either reflection (0 for a symmetric p)."""
    a = np.max(np.abs(conj_flip(p).coeffs - p.coeffs))
    b = np.max(np.abs(point_flip(p).coeffs - p.coeffs))
    return float(max(a, b))


def symmetry_residual(f: Callable, samples, sign: int = 1) -> float:
    """Max relative deviation of f under z -> 1-z (times ``sign``) and z -> conj."""
    z = np.atleast_1d(np.asarray(samples, dtype=np.complex128))
    fz = np.asarray(f(z), dtype=np.complex128)
    scale = 1.0 + np.abs(fz)
    point = np.abs(fz - sign * np.asarray(f(1.0 - z))) / scale
    real = np.abs(fz - np.conj(np.asarray(f(np.conj(z))))) / scale
    return float(max(point.max(), real.max()))
