"""Zero counting and location.

Winding counts track the boundary phase adaptively: a segment is bisected
until consecutive samples differ in phase by less than pi/2, so the total
change is unambiguous. Callers working far from the real axis may pass
``log=True`` with a function returning a branch of log f; only its
imaginary part is used, which sidesteps overflow of completed functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import complexfn as cf
from .errors import (
    DegreeMismatch,
    DomainError,
    NoConvergence,
    SamplingBudgetExceeded,
    SymmetryViolation,
    ZeroOnBoundary,
)
from .interpolation import DiscRegion

PHASE_STEP = np.pi / 2
SPLIT_FRACTIONS = (0.5, 0.4637, 0.5419, 0.4133)
MAX_BOUNDARY_SAMPLES = 2 ** 20


@dataclass(frozen=True)
class RectRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DomainError("rectangle must have re_min < re_max and im_min < im_max")

    def contains(self, z, strict: bool = True):
        z = np.asarray(z)
        if strict:
            return ((z.real > self.re_min) & (z.real < self.re_max)
                    & (z.imag > self.im_min) & (z.imag < self.im_max))
        return ((z.real >= self.re_min) & (z.real <= self.re_max)
                & (z.imag >= self.im_min) & (z.imag <= self.im_max))

    def corners(self):
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))

    def split(self, frac: float = 0.5):
        """Four sub-rectangles cut at the fraction ``frac`` of each side."""
        xm = self.re_min + frac * (self.re_max - self.re_min)
        ym = self.im_min + frac * (self.im_max - self.im_min)
        return (RectRegion(self.re_min, xm, self.im_min, ym), RectRegion(xm, self.re_max, self.im_min, ym),
                RectRegion(self.re_min, xm, ym, self.im_max), RectRegion(xm, self.re_max, ym, self.im_max))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def to_list(self):
        return [self.re_min, self.re_max, self.im_min, self.im_max]


Region = Union[RectRegion, DiscRegion]


def _boundary_point(region: Region, t: np.ndarray) -> np.ndarray:
    """Counter-clockwise parametrisation on t in [0, 1]."""
    if isinstance(region, DiscRegion):
        return region.center + region.radius * np.exp(2j * np.pi * t)
    c = region.corners()
    s = 4.0 * t
    edge = np.minimum(np.floor(s).astype(int), 3)
    frac = s - edge
    start = np.array(c)[edge]
    end = np.array(c[1:] + c[:1])[edge]
    return start + frac * (end - start)


def _phase(f, z, log, smooth=None):
    """(wrapped phase, unwrapped phase, log modulus) at z."""
    vals = np.asarray(f(z), dtype=np.complex128)
    if log:
        ph, lm = vals.imag, vals.real
    else:
        with np.errstate(divide="ignore"):
            ph, lm = np.angle(vals), np.log(np.abs(vals))
    if smooth is None:
        return ph, np.zeros_like(lm), lm
    sv = np.asarray(smooth(z), dtype=np.complex128)
    return ph, sv.imag, lm + sv.real


def _wrap(d):
    return (d + np.pi) % (2 * np.pi) - np.pi


@dataclass
class WindingResult:
    winding: int
    samples: int
    min_log_modulus: float


def winding_trace(f: Callable, region: Region, init_samples: int = 256, *, log: bool = False,
                  zero_threshold: float = 1e-12, max_samples: int = MAX_BOUNDARY_SAMPLES,
                  smooth: Callable | None = None) -> WindingResult:
    """Winding of f (times exp(smooth)) around the region boundary.

    ``smooth`` is an entire function, typically a polynomial exponent, whose
    imaginary part is already a continuous branch; it contributes its raw
    change instead of a wrapped one, so fast rotation of exp(smooth) cannot alias.
    """
    t = np.linspace(0.0, 1.0, init_samples + 1)
    ph, sm, lm = _phase(f, _boundary_point(region, t), log, smooth)
    while True:
        if not np.all(np.isfinite(lm)):
            i = int(np.flatnonzero(~np.isfinite(lm))[0])
            raise ZeroOnBoundary(f"f vanishes or is singular at {_boundary_point(region, t[i:i+1])[0]}")
        d = _wrap(np.diff(ph)) + np.diff(sm)
        bad = np.flatnonzero(np.abs(d) >= PHASE_STEP)
        if bad.size == 0:
            # a step can alias to something small; the two half-steps of an
            # honest segment add up to the whole one, an aliased one is off by 2 pi
            tm = 0.5 * (t[:-1] + t[1:])
            pm, smm, _ = _phase(f, _boundary_point(region, tm), log, smooth)
            halves = _wrap(pm - ph[:-1]) + (smm - sm[:-1]) + _wrap(ph[1:] - pm) + (sm[1:] - smm)
            bad = np.flatnonzero(np.abs(halves - d) > np.pi)
            if bad.size == 0:
                break
        # |f| itself can legitimately span many orders along the path, so the
        # zero test is on geometry: a phase jump that survives refinement to a
        # segment of relative length zero_threshold marks a zero on the contour.
        short = bad[(t[bad + 1] - t[bad]) < zero_threshold]
        if short.size:
            raise ZeroOnBoundary(
                f"unresolvable phase jump near {_boundary_point(region, t[short[:1]])[0]}")
        if t.size + bad.size > max_samples:
            raise SamplingBudgetExceeded(f"more than {max_samples} boundary samples needed")
        tm = 0.5 * (t[bad] + t[bad + 1])
        pm, smm, lmm = _phase(f, _boundary_point(region, tm), log, smooth)
        t = np.insert(t, bad + 1, tm)
        ph = np.insert(ph, bad + 1, pm)
        sm = np.insert(sm, bad + 1, smm)
        lm = np.insert(lm, bad + 1, lmm)
    total = float(np.sum(d)) / (2 * np.pi)
    return WindingResult(int(np.rint(total)), int(t.size), float(lm.min()))


def winding_count(f: Callable, region: Region, init_samples: int = 256, *, log: bool = False,
                  zero_threshold: float = 1e-12, max_samples: int = MAX_BOUNDARY_SAMPLES,
                  smooth: Callable | None = None) -> int:
    """Zeros minus poles of f enclosed by the region boundary."""
    return winding_trace(f, region, init_samples, log=log, zero_threshold=zero_threshold,
                         max_samples=max_samples, smooth=smooth).winding


def completed_winding(f, eq: cf.FunctionalEquation, region: Region, init_samples: int = 256,
                      **kw) -> int:
    """Winding of the completed function Q*f, tracked through its logarithm.

    A handle carrying an exponential factor e^h has h passed as the smooth
    part of the phase.
    """
    h = getattr(f, "exp_shift", None)
    if h is None:
        return winding_count(lambda s: cf.lambda_log(f, eq, s), region, init_samples, log=True, **kw)
    def rest(s):
        return cf.log_q_eval(eq.q, s) + f.log_eval(s, include_shift=False)
    return winding_count(rest, region, init_samples, log=True, smooth=h, **kw)


def refine_zero(f: Callable, s0: complex, tol: float = 1e-12, max_iter: int = 64):
    """Damped Newton iteration with a central-difference derivative; returns (s, |f(s)|).

    A step that does not reduce |f| is halved (up to 30 times) before the
    iteration gives up and returns the best point seen.
    """
    s = complex(s0)
    fs = complex(f(s))
    for _ in range(max_iter):
        if fs == 0:
            return s, 0.0
        h = 1e-6 * (1.0 + abs(s))
        df = (complex(f(s + h)) - complex(f(s - h))) / (2 * h)
        if df == 0:
            raise NoConvergence(f"vanishing derivative at {s}")
        step = fs / df
        for _ in range(31):
            trial = s - step
            ft = complex(f(trial))
            if abs(ft) < abs(fs):
                break
            step *= 0.5
        else:
            return s, abs(fs)  # |f| stopped improving
        s, fs = trial, ft
        if abs(step) < tol:
            return s, abs(fs)
    raise NoConvergence(f"Newton did not converge from {s0} in {max_iter} iterations")


@dataclass
class ZeroReport:
    region: Region
    winding: int
    declared_poles: list = field(default_factory=list)
    refined_zeros: list = field(default_factory=list)
    samples: int = 0
    refinement_iterations: int = 0

    @property
    def zeros(self) -> int:
        return self.winding + sum(m for _, m in self.declared_poles)

    def to_dict(self) -> dict:
        reg = self.region
        region = (reg.to_list() if isinstance(reg, RectRegion)
                  else {"center": [reg.center.real, reg.center.imag], "radius": reg.radius})
        return {
            "region": region,
            "winding": self.winding,
            "zeros": self.zeros,
            "declared_poles": [[complex(b).real, complex(b).imag, m] for b, m in self.declared_poles],
            "refined_zeros": [{"re": z.real, "im": z.imag, "residual": r} for z, r in self.refined_zeros],
            "samples": self.samples,
            "refinement_iterations": self.refinement_iterations,
        }


def locate_zeros(f: Callable, region: RectRegion, *, poles: Sequence[tuple] = (),
                 init_samples: int = 128, min_size: float = 1e-3, tol: float = 1e-12,
                 log_f: Callable | None = None, max_depth: int = 24) -> ZeroReport:
    """Winding count over ``region`` and Newton-refined zeros found by quadtree subdivision.

    ``log_f``, when given, is used for the winding counts (log mode) while
    ``f`` serves Newton refinement.
    """
    count_f, log = (log_f, True) if log_f is not None else (f, False)
    top = winding_trace(count_f, region, init_samples, log=log)
    inside = [(b, m) for b, m in poles if region.contains(b)]
    report = ZeroReport(region, top.winding, inside, samples=top.samples)
    if inside:
        return report  # refinement only for pole-free regions
    stack = [(region, top.winding, 0)]
    iters = 0
    while stack:
        reg, w, depth = stack.pop()
        if w <= 0:
            continue
        size = max(reg.re_max - reg.re_min, reg.im_max - reg.im_min)
        last = size < min_size or depth >= max_depth
        if w == 1 and size < 0.25 or last:
            z, r = refine_zero(f, reg.center, tol)
            iters += 1
            # Newton may wander into a neighbour's basin; accept only a zero in this cell
            grown = RectRegion(reg.re_min - 1e-9, reg.re_max + 1e-9, reg.im_min - 1e-9, reg.im_max + 1e-9)
            if (w == 1 and bool(grown.contains(z))) or last:
                report.refined_zeros.append((z, r))
                continue
        # a zero sitting on a cut (or a miscount) is retried with an off-centre cut
        for frac in SPLIT_FRACTIONS:
            try:
                subs = [(sub, winding_trace(count_f, sub, init_samples, log=log))
                        for sub in reg.split(frac)]
            except ZeroOnBoundary:
                continue
            if sum(ws.winding for _, ws in subs) == w:
                break
        else:
            raise ZeroOnBoundary(f"no clean subdivision of {reg.to_list()}")
        for sub, ws in subs:
            report.samples += ws.samples
            stack.append((sub, ws.winding, depth + 1))
    report.refinement_iterations = iters
    report.refined_zeros.sort(key=lambda zr: (zr[0].imag, zr[0].real))
    return report


# --------------------------------------------------------------------------
# critical axis

@dataclass
class AxisFunction:
    """t -> sign-carrying real function rotation * Lambda(1/2 + it), via log values."""

    f: Callable
    eq: cf.FunctionalEquation
    rotation: float = 0.0

    def phase(self, t):
        s = 0.5 + 1j * np.asarray(t, dtype=float)
        lg = np.asarray(cf.lambda_log(self.f, self.eq, s))
        return lg.imag - self.rotation, lg.real

    def sign(self, t):
        ph, _ = self.phase(t)
        return np.sign(np.cos(ph))


def critical_scan(f: Callable, eq: cf.FunctionalEquation, t_min: float, t_max: float,
                  step: float, *, tol: float = 1e-9, symmetry_tol: float = 1e-6) -> list:
    """Heights t of sign changes of the rotated completed function on Re s = 1/2."""
    if not (t_max > t_min and step > 0):
        raise DomainError("need t_max > t_min and step > 0")
    n = int(np.ceil((t_max - t_min) / step))
    ts = t_min + step * np.arange(n + 1)
    ts[-1] = min(ts[-1], t_max)
    axis = AxisFunction(f, eq)
    ph, lm = axis.phase(ts)
    ref = int(np.argmax(lm))
    axis.rotation = float(np.mod(ph[ref], np.pi))
    ph = ph - axis.rotation
    dev = np.abs(np.sin(ph))
    if np.any(dev > symmetry_tol):
        i = int(np.argmax(dev))
        raise SymmetryViolation(
            f"rotated axis function is not real at t={ts[i]:.6g} (relative imaginary part {dev[i]:.3g})")
    sg = np.sign(np.cos(ph))
    heights = []
    for i in np.flatnonzero(sg[:-1] * sg[1:] < 0):
        lo, hi = ts[i], ts[i + 1]
        slo = sg[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            sm = axis.sign(mid)
            if sm == slo:
                lo = mid
            else:
                hi = mid
        heights.append(0.5 * (lo + hi))
    return heights


# --------------------------------------------------------------------------
# curves over finite fields

@dataclass(frozen=True)
class WeilPolynomial:
    coeffs: tuple
    q: float
    genus: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) - 1 != 2 * self.genus:
            raise DegreeMismatch(
                f"degree {len(self.coeffs) - 1} differs from 2*genus = {2 * self.genus}")
        if self.coeffs[0] != 1:
            raise DomainError("a Weil polynomial has P(0) = 1")
        if self.q <= 1:
            raise DomainError("q must exceed 1")

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, np.asarray(self.coeffs, dtype=float))


@dataclass
class WeilResult:
    functional_ok: bool
    rh_ok: bool
    roots: list
    printed_identity_ok: bool
    reciprocal_identity_ok: bool

    def __iter__(self):
        return iter((self.functional_ok, self.rh_ok, self.roots))


def weil_roots(p: WeilPolynomial) -> np.ndarray:
    c = np.asarray(p.coeffs, dtype=float)
    if c.size == 1:
        return np.zeros(0, dtype=np.complex128)
    if c.size == 3:
        c0, c1, c2 = c
        disc = np.sqrt(complex(c1 * c1 - 4 * c2 * c0))
        # numerically stable pairing of the two quadratic roots
        qq = -0.5 * (c1 + np.copysign(1.0, c1) * disc) if c1 != 0 else -0.5 * disc
        if qq == 0:
            return np.zeros(2, dtype=np.complex128)
        return np.array([qq / c2, c0 / qq], dtype=np.complex128)
    comp = np.polynomial.polynomial.polycompanion(c)
    return np.linalg.eigvals(comp).astype(np.complex128)


def weil_check(p: WeilPolynomial, tol: float = 1e-9) -> WeilResult:
    """Functional equation (roots closed under a -> 1/(q a)) and RH (|a| = q^{-1/2})."""
    roots = weil_roots(p)
    q = float(p.q)
    if roots.size == 0:
        return WeilResult(True, True, [], True, True)
    target = 1.0 / (q * roots)
    cost = np.abs(roots[:, None] - target[None, :])
    r, c = linear_sum_assignment(cost)
    functional_ok = bool(np.all(cost[r, c] <= tol))
    rh_ok = bool(np.all(np.abs(np.abs(roots) - q ** -0.5) <= tol))
    # the coefficient identity in its printed form and in reciprocal form
    ts = np.array([0.7, 1.3, -0.45, 2.2])
    g = p.genus
    lhs = p(1.0 / (q * ts))
    printed = ts ** (2 * g) * q ** (-g) * p(ts)
    recip = ts ** (-2 * g) * q ** (-g) * p(ts)
    scale = 1.0 + np.abs(lhs)
    return WeilResult(functional_ok, rh_ok, sorted(roots.tolist(), key=lambda z: (z.real, z.imag)),
                      bool(np.all(np.abs(lhs - printed) <= 1e-9 * scale)),
                      bool(np.all(np.abs(lhs - recip) <= 1e-9 * scale)))
