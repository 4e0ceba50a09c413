"""Explicit polynomial approximation of 1 on a disc with planted zeros.

The approximant is a product of factors ``1 - phi_a`` where

    phi_a(z) = w(z) / w(a) * ((z - c) / (a - c))**n

equals 1 at the planted point a, is divisible by the vanishing polynomial w
of the interpolation set, and is geometrically small on the disc |z - c| <= r
whenever r < |a - c|.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BudgetUnattainable,
    DomainError,
    InfeasibleGeometry,
    PointInsideDisc,
    ZeroDenominator,
)
from .symmetry import CRITICAL_CENTER, Polynomial, orbit

DEFAULT_N_CAP = 4096
DEFAULT_N_STEP = 8
DEFAULT_MAX_DEGREE = 300
DEFAULT_BOUNDARY_SAMPLES = 4096


@dataclass(frozen=True)
class DiscRegion:
    center: complex = CRITICAL_CENTER
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise DomainError("disc radius must be positive")

    def contains(self, z, strict: bool = False):
        d = np.abs(np.asarray(z) - self.center)
        return d < self.radius if strict else d <= self.radius

    def boundary(self, m: int) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(m) / m
        return self.center + self.radius * np.exp(1j * theta)

    def interior_samples(self, m: int, seed: int = 0, extra: Sequence[complex] = ()) -> np.ndarray:
        """``m`` points uniformly distributed in the closed disc, plus ``extra``."""
        rng = np.random.default_rng(seed)
        n = m - len(extra)
        rho = self.radius * np.sqrt(rng.uniform(0.0, 1.0, n))
        theta = rng.uniform(0.0, 2.0 * np.pi, n)
        pts = self.center + rho * np.exp(1j * theta)
        return np.concatenate([np.asarray(extra, dtype=np.complex128), pts])


@dataclass(frozen=True)
class InterpolationSet:
    """Points b with orders m_b at which p - 1 must vanish."""

    points: tuple = ()

    def __post_init__(self):
        pts = tuple((complex(b), int(m)) for b, m in self.points)
        object.__setattr__(self, "points", pts)
        locs = [b for b, _ in pts]
        if len(set(locs)) != len(locs):
            raise DomainError("interpolation points must be distinct")
        if any(m < 1 for _, m in pts):
            raise DomainError("multiplicities must be positive")
        orders = dict(pts)
        for b, m in pts:
            for r in (1.0 - b, b.conjugate(), 1.0 - b.conjugate()):
                if orders.get(r) != m:
                    raise DomainError(
                        f"interpolation set is not closed under both reflections at {b}")

    @classmethod
    def symmetric(cls, seeds: Sequence[tuple]) -> "InterpolationSet":
        """Close (b, m) pairs under both reflections."""
        orders = {}
        for b, m in seeds:
            for z in orbit(b):
                orders[z] = max(orders.get(z, 0), int(m))
        return cls(tuple(orders.items()))

    @property
    def max_order(self) -> int:
        return max((m for _, m in self.points), default=0)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class PlantedZeroSet:
    seeds: tuple = ()
    closure: tuple = field(init=False)

    def __post_init__(self):
        seeds = []
        closure = []
        for a in self.seeds:
            a = complex(a)
            if a in closure:
                continue  # already represented by an earlier seed's orbit
            seeds.append(a)
            closure.extend(z for z in orbit(a) if z not in closure)
        object.__setattr__(self, "seeds", tuple(seeds))
        object.__setattr__(self, "closure", tuple(closure))

    def validate(self, disc: DiscRegion, interp: InterpolationSet = InterpolationSet(),
                 off_axes: bool = True) -> None:
        """Raise unless the closure avoids B and lies strictly outside the disc.

        ``off_axes`` additionally rejects points on the critical or real axis.
        """
        bset = {b for b, _ in interp.points}
        for a in self.closure:
            if off_axes and a.real == 0.5:
                raise InfeasibleGeometry(f"planted point {a} lies on the critical axis")
            if off_axes and a.imag == 0.0:
                raise InfeasibleGeometry(f"planted point {a} lies on the real axis")
            if a in bset:
                raise InfeasibleGeometry(f"planted point {a} collides with the interpolation set")
            if abs(a - disc.center) <= disc.radius:
                raise InfeasibleGeometry(f"planted point {a} is not strictly outside the disc")

    def __len__(self):
        return len(self.closure)


def vanishing_poly(interp: InterpolationSet, center: complex = CRITICAL_CENTER) -> Polynomial:
    roots = [b for b, m in interp.points for _ in range(m)]
    return Polynomial.from_roots(roots, center)


def bump_poly(a: complex, w: Polynomial, disc: DiscRegion, n: int) -> Polynomial:
    """phi_a = (w / w(a)) * ((z - c) / (a - c))**n."""
    a = complex(a)
    c = disc.center
    if abs(a - c) <= disc.radius:
        raise PointInsideDisc(f"{a} lies in the closed disc |z-{c}|<={disc.radius}")
    wa = w(a)
    if wa == 0:
        raise ZeroDenominator(f"w vanishes at {a}; planted point collides with B")
    mono = np.zeros(n + 1, dtype=np.complex128)
    mono[n] = (1.0 / (a - c)) ** n
    return Polynomial(mono, c) * (w._keep_center(c) * (1.0 / wa))


def bump_bound(a: complex, w: Polynomial, disc: DiscRegion, n: int) -> float:
    """Certified bound for sup |phi_a| on the disc."""
    wmax = w.recenter(disc.center).coeff_abs_sum(disc.radius)
    return wmax / abs(w(a)) * (disc.radius / abs(a - disc.center)) ** n


def _product_bound(bounds) -> float:
    return float(np.prod([1.0 + b for b in bounds]) - 1.0)


@dataclass(frozen=True)
class Approximant:
    poly: Polynomial
    n: int
    apriori_bound: float
    roots: tuple


def constrained_one_approximant(planted: PlantedZeroSet, interp: InterpolationSet,
                                disc: DiscRegion, eps1: float, *, roots: str = "closure",
                                n_cap: int = DEFAULT_N_CAP, n_step: int = DEFAULT_N_STEP,
                                max_degree: int = DEFAULT_MAX_DEGREE,
                                off_axes: bool = False, return_info: bool = False):
    """p with |p - 1| < eps1 on the disc, p = 0 on the planted points, p - 1 flat on B.

    ``roots="closure"`` plants every point of every orbit; ``roots="seeds"``
    plants one representative per orbit (the four-fold product then restores
    the rest with multiplicity one).
    """
    if not 0 < eps1 < 1:
        raise DomainError("eps1 must lie in (0, 1)")
    if roots not in ("closure", "seeds"):
        raise DomainError("roots must be 'closure' or 'seeds'")
    for b, _ in interp.points:
        if abs(b - disc.center) >= disc.radius:
            raise InfeasibleGeometry(f"interpolation point {b} is not interior to the disc")
    planted.validate(disc, interp, off_axes=off_axes)
    pts = planted.closure if roots == "closure" else planted.seeds
    c = disc.center
    if not pts:
        p = Polynomial.constant(1.0, c)
        return Approximant(p, 0, 0.0, ()) if return_info else p

    w = vanishing_poly(interp, c)
    wmax = w.coeff_abs_sum(disc.radius)
    base = np.array([wmax / abs(w(a)) for a in pts])
    ratio = np.array([disc.radius / abs(a - c) for a in pts])
    # B is symmetric about c, so phi_a(2c - z) = (-1)^(n + deg w) phi_a(z); an odd
    # total degree keeps p away from zero at the reflected point 1 - a.
    n = n_step + (1 - (n_step + w.degree) % 2 if roots == "seeds" else 0)
    others = [z for z in planted.closure if z not in pts]
    while True:
        if n > n_cap:
            raise BudgetUnattainable(f"exponent would exceed the cap {n_cap}")
        bound = _product_bound(base * ratio ** n)
        if bound < eps1:
            degree = len(pts) * (n + w.degree)
            if degree > max_degree:
                raise BudgetUnattainable(
                    f"approximant degree {degree} exceeds the cap {max_degree}; "
                    "move planted points further from the disc or loosen eps1")
            p = Polynomial.constant(1.0, c)
            for a in pts:
                p = p * (1.0 - bump_poly(a, w, disc, n))
            # p must not vanish on orbit points it was not asked to plant
            if all(abs(p(z)) > 1e-3 for z in others):
                break
        n += n_step
    if return_info:
        return Approximant(p, n, bound, tuple(pts))
    return p


@dataclass(frozen=True)
class SupNorm:
    estimate: float
    certified_bound: float

    def __iter__(self):
        return iter((self.estimate, self.certified_bound))


def sup_norm_disc(p: Polynomial, disc: DiscRegion, m: int = DEFAULT_BOUNDARY_SAMPLES) -> SupNorm:
    """Sampled boundary maximum plus a Lipschitz correction that bounds the true sup."""
    if m < 64:
        raise DomainError("need at least 64 boundary samples")
    q = p.recenter(disc.center)
    est = float(np.max(np.abs(q(disc.boundary(m)))))
    r = disc.radius
    k = np.arange(1, q.coeffs.size)
    dmax = float(np.sum(k * np.abs(q.coeffs[1:]) * r ** (k - 1))) if k.size else 0.0
    return SupNorm(est, est + np.pi * r / m * dmax)
