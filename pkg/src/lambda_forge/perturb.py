"""RH-breaking and RH-restoring perturbations of a base L-function.

``g = nu * f`` plants zeros off the critical axis while keeping g within eps of
f on the working disc; ``g_plus = (exp(h) / f_o) * g`` removes them again.
"""
from __future__ import annotations

from math import comb
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import complexfn as cf
from .errors import (
    BranchTrackingFailure,
    DomainError,
    FitResidualTooLarge,
    NumericError,
    PoleOnBoundary,
    UncancelledPole,
)
from .interpolation import (
    DEFAULT_BOUNDARY_SAMPLES,
    DiscRegion,
    InterpolationSet,
    PlantedZeroSet,
    constrained_one_approximant,
    sup_norm_disc,
)
from .symmetry import Polynomial, coefficient_asymmetry, conj_flip, four_fold, point_flip

BASES = ("riemann_zeta", "dirichlet_l", "constant_one", "synthetic")


def _synthetic_antisymmetric(z):
    u = z - 0.5
    return u * (1.0 + 0.3 * u ** 2 - 0.05 * u ** 4)


def _synthetic_symmetric(z):
    u = z - 0.5
    return 1.0 + 0.3 * u ** 2 - 0.05 * u ** 4


SYNTHETIC = {
    "zero": lambda z: np.zeros_like(z),
    "two": lambda z: np.full_like(z, 2.0),
    "identity": lambda z: z,
    "symmetric_quartic": _synthetic_symmetric,
    "antisymmetric_quintic": _synthetic_antisymmetric,
}


@dataclass(frozen=True)
class LFunctionHandle:
    """base(z) * multiplier(z) * exp(exp_shift(z)) / divisor(z)."""

    base: str = "riemann_zeta"
    character: Optional[cf.DirichletCharacter] = None
    synthetic: Optional[str] = None
    multiplier: Optional[Polynomial] = None
    exp_shift: Optional[Polynomial] = None
    divisor: Optional[Polynomial] = None
    params: cf.EvalParams = cf.DEFAULT_PARAMS

    def __post_init__(self):
        if self.base not in BASES:
            raise DomainError(f"unknown base {self.base!r}")
        if self.base == "dirichlet_l" and self.character is None:
            raise DomainError("dirichlet_l base needs a character")
        if self.base == "synthetic" and self.synthetic not in SYNTHETIC:
            raise DomainError(f"unknown synthetic function {self.synthetic!r}")
        # declared cancellation: f_o equal to the multiplier drops out exactly
        if (self.multiplier is not None and self.divisor is not None
                and _same_poly(self.multiplier, self.divisor)):
            object.__setattr__(self, "multiplier", None)
            object.__setattr__(self, "divisor", None)

    @classmethod
    def zeta(cls, params: cf.EvalParams = cf.DEFAULT_PARAMS) -> "LFunctionHandle":
        return cls("riemann_zeta", params=params)

    @classmethod
    def dirichlet(cls, chi: cf.DirichletCharacter,
                  params: cf.EvalParams = cf.DEFAULT_PARAMS) -> "LFunctionHandle":
        return cls("dirichlet_l", character=chi, params=params)

    @classmethod
    def one(cls) -> "LFunctionHandle":
        return cls("constant_one")

    @classmethod
    def synthetic_fn(cls, name: str) -> "LFunctionHandle":
        return cls("synthetic", synthetic=name)

    def base_value(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.base == "riemann_zeta":
            return np.asarray(cf.zeta(z, self.params))
        if self.base == "dirichlet_l":
            return np.asarray(cf.dirichlet_l(self.character, z, self.params))
        if self.base == "constant_one":
            return np.ones_like(z)
        return np.asarray(SYNTHETIC[self.synthetic](z), dtype=np.complex128)

    def poles(self) -> list:
        """Poles of the base function as (location, order)."""
        if self.base == "riemann_zeta":
            return [(1.0 + 0j, 1)]
        if self.base == "dirichlet_l" and self.character.is_principal:
            return [(1.0 + 0j, 1)]
        return []

    def __call__(self, z):
        arr = np.asarray(z, dtype=np.complex128)
        out = self.base_value(arr)
        if self.multiplier is not None:
            out = out * self.multiplier(arr)
        if self.exp_shift is not None:
            out = out * np.exp(self.exp_shift(arr))
        if self.divisor is not None:
            out = out / self.divisor(arr)
        if arr.shape == ():
            return complex(out)
        return out

    def log_eval(self, z, include_shift: bool = True):
        """A branch of log of the handle, usable where the value itself overflows."""
        arr = np.asarray(z, dtype=np.complex128)
        with np.errstate(divide="ignore"):
            out = np.log(self.base_value(arr).astype(np.complex128))
            if self.multiplier is not None:
                out = out + np.log(self.multiplier(arr))
            if self.exp_shift is not None and include_shift:
                out = out + self.exp_shift(arr)
            if self.divisor is not None:
                out = out - np.log(self.divisor(arr))
        return out

    def describe(self) -> dict:
        d = {"base": self.base}
        if self.character is not None:
            d["character_modulus"] = self.character.modulus
            d["character_values"] = list(self.character.values)
        if self.synthetic is not None:
            d["synthetic"] = self.synthetic
        for name in ("multiplier", "exp_shift", "divisor"):
            p = getattr(self, name)
            if p is not None:
                d[f"{name}_degree"] = p.degree
        return d


def _same_poly(p: Polynomial, q: Polynomial) -> bool:
    return (p.center == q.center and p.coeffs.size == q.coeffs.size
            and bool(np.all(p.coeffs == q.coeffs)))


# --------------------------------------------------------------------------
# certificates

@dataclass
class Certificate:
    sup_nu_minus_1: float = float("nan")
    eps_budget: float = float("nan")
    m_on_boundary: float = float("nan")
    planted_zero_residuals: list = field(default_factory=list)
    symmetry_residual: float = float("nan")
    fe_residual_max: float = float("nan")
    closeness_max: float = float("nan")
    sample_counts: dict = field(default_factory=dict)
    verdict: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.verdict) and all(v["pass"] for v in self.verdict.values())

    def check(self, name: str, value: float, tol: float, *, at_least: bool = False) -> bool:
        ok = bool(value >= tol) if at_least else bool(value < tol)
        self.verdict[name] = {"value": float(value), "tol": float(tol), "pass": ok}
        return ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


# --------------------------------------------------------------------------
# construction

def epsilon_budget(f: Callable, disc: DiscRegion, eps: float,
                   samples: int = DEFAULT_BOUNDARY_SAMPLES, safety: float = 1.05):
    """(M, eps0) with M = safety * max |f| on the boundary circle, eps0 = eps / M."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    try:
        coarse = np.abs(np.asarray(f(disc.boundary(samples))))
        fine = np.abs(np.asarray(f(disc.boundary(2 * samples))))
    except NumericError as exc:
        raise PoleOnBoundary(f"f is singular on the disc boundary: {exc}") from exc
    if not (np.all(np.isfinite(coarse)) and np.all(np.isfinite(fine))):
        raise PoleOnBoundary("non-finite samples on the disc boundary")
    # a pole on the circle makes the maximum grow with the sampling density
    if fine.max() > 1.5 * coarse.max():
        raise PoleOnBoundary("boundary maximum diverges under refinement")
    m_boundary = safety * float(fine.max())
    return m_boundary, eps / m_boundary


@dataclass
class NuResult:
    nu: Polynomial
    p: Polynomial
    eps1: float
    n: int
    crude_bound: float
    sup_estimate: float
    certified_bound: float
    eps0: float

    def fragment(self) -> dict:
        return {
            "eps0": self.eps0,
            "eps1": self.eps1,
            "exponent": self.n,
            "degree_p": self.p.degree,
            "degree_nu": self.nu.degree,
            "crude_bound": self.crude_bound,
            "sup_estimate": self.sup_estimate,
            "certified_bound": self.certified_bound,
        }

    def __iter__(self):
        return iter((self.nu, self.fragment()))


def build_nu(planted: PlantedZeroSet, interp: InterpolationSet, disc: DiscRegion,
             eps0: float, *, strict: bool = False, off_axes: bool = True,
             boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES, max_halvings: int = 60,
             **approx_kwargs) -> NuResult:
    """Symmetric multiplier nu with certified sup |nu - 1| < eps0 on the disc."""
    if not 0 < eps0 < 0.5:
        raise DomainError("eps0 must lie in (0, 1/2)")
    if strict and not planted.seeds:
        raise DomainError("a strict perturbation (g != f) needs at least one planted point")
    if not planted.seeds:
        one = Polynomial.constant(1.0, disc.center)
        return NuResult(one, one, 0.0, 0, 0.0, 0.0, 0.0, eps0)
    planted.validate(disc, interp, off_axes=off_axes)
    eps1 = eps0 / 8.0
    for _ in range(max_halvings):
        info = constrained_one_approximant(planted, interp, disc, eps1, roots="seeds",
                                           return_info=True, **approx_kwargs)
        nu = four_fold(info.poly)
        est, cert = sup_norm_disc(nu - 1.0, disc, boundary_samples)
        crude = (1.0 + eps1) ** 4 - 1.0
        if cert < eps0:
            return NuResult(nu, info.poly, eps1, info.n, crude, est, cert, eps0)
        eps1 /= 2.0
    raise DomainError("could not certify |nu - 1| < eps0")  # pragma: no cover


def perturb(f: LFunctionHandle, nu: Polynomial, disc: Optional[DiscRegion] = None,
            tol: float = 1e-8) -> LFunctionHandle:
    """g = nu * f, after checking that 1 - nu cancels every pole of f in the disc."""
    for b, order in f.poles():
        if disc is not None and not disc.contains(b, strict=True):
            continue
        d = nu.derivatives(b, order)
        d[0] -= 1.0
        scale = 1.0 + float(np.max(np.abs(nu.coeffs)))
        if np.any(np.abs(d) > tol * scale):
            raise UncancelledPole(
                f"nu - 1 does not vanish to order {order} at the pole {b}; "
                "add the pole to the interpolation set")
    mult = nu if f.multiplier is None else f.multiplier * nu
    return replace(f, multiplier=mult)


def certify_perturbation(f: LFunctionHandle, g: LFunctionHandle, nu_result: NuResult,
                         planted: PlantedZeroSet, disc: DiscRegion, eq: cf.FunctionalEquation,
                         eps: float, m_boundary: float, *, interior: int = 4096,
                         grid_n: int = 20, fe_tol: float = 1e-8, planted_tol: float = 1e-10,
                         symmetry_tol: float = 1e-13, seed: int = 0) -> Certificate:
    """Closeness, functional equation, planted zeros and symmetry of g = nu f."""
    cert = Certificate(eps_budget=nu_result.eps0, m_on_boundary=m_boundary)
    nu = nu_result.nu
    cert.sup_nu_minus_1 = nu_result.certified_bound
    cert.check("sup_nu_minus_1", nu_result.certified_bound, nu_result.eps0)

    # sample near the poles too: (nu - 1) f stays bounded there
    extra = []
    for b, _ in f.poles():
        if disc.contains(b, strict=True):
            extra += [b + r * np.exp(1j * th) for r in (1e-2, 1e-4, 1e-6)
                      for th in (0.3, 2.0, 4.1)]
    pts = disc.interior_samples(interior, seed=seed, extra=extra)
    diff = np.abs((nu(pts) - 1.0) * f(pts))
    cert.closeness_max = float(diff.max())
    cert.check("closeness", cert.closeness_max, eps)

    gpts = _fe_grid(grid_n)
    fe = np.asarray(cf.fe_residual(g, eq, gpts))
    cert.fe_residual_max = float(fe.max())
    cert.check("fe_residual", cert.fe_residual_max, fe_tol)

    scale = 1.0 + float(np.max(np.abs(nu.coeffs)))
    cert.planted_zero_residuals = [float(abs(nu(a))) for a in planted.closure]
    if planted.closure:
        cert.check("planted_zeros", max(cert.planted_zero_residuals), planted_tol * scale)

    cert.symmetry_residual = coefficient_asymmetry(nu)
    cert.check("nu_coefficient_symmetry", cert.symmetry_residual, symmetry_tol)
    cert.sample_counts = {"interior": int(pts.size), "fe_grid": int(gpts.size)}
    return cert


def _fe_grid(n: int) -> np.ndarray:
    return cf.grid((-2.0, 3.0), (-30.0, 30.0), n, n, exclude=((0.0, 0.1), (1.0, 0.1)))


# --------------------------------------------------------------------------
# restoring the hypothesis

@dataclass
class RestoreResult:
    g_plus: LFunctionHandle
    h: Polynomial
    g_minus: LFunctionHandle
    f_o: Polynomial
    closeness_max: float
    fit_residual: float
    sample_count: int


def _tracked_log(fo: Polynomial, path: np.ndarray, anchor: complex) -> np.ndarray:
    """Continuous branch of log fo along ``path``, starting at the branch value ``anchor``."""
    vals = fo(path)
    if np.any(vals == 0):
        raise BranchTrackingFailure("f_o vanishes on a sampling path")
    lg = np.log(vals)
    steps = np.diff(lg.imag)
    wrapped = (steps + np.pi) % (2 * np.pi) - np.pi
    if np.any(np.abs(wrapped) > np.pi / 2):
        raise BranchTrackingFailure("phase jump above pi/2 between samples; refine sampling")
    imag = np.concatenate([[0.0], np.cumsum(wrapped)])
    base_im = anchor.imag + (lg.imag[0] - anchor.imag
                             - 2 * np.pi * np.round((lg.imag[0] - anchor.imag) / (2 * np.pi)))
    return lg.real + 1j * (base_im + imag)


def _log_series(t: np.ndarray) -> np.ndarray:
    """Taylor coefficients of log(sum t_j x^j) given t_0 != 0 (branch of log t_0 principal)."""
    m = t.size
    out = np.zeros(m, dtype=np.complex128)
    out[0] = np.log(t[0])
    for j in range(1, m):
        acc = t[j]
        for i in range(1, j):
            acc -= i * out[i] * t[j - i] / j
        out[j] = acc / t[0]
    return out


def fit_log(fo: Polynomial, disc: DiscRegion, *, degree: int = 40,
            excluded: Sequence[DiscRegion] = (), constraints: Sequence[tuple] = (),
            boundary_samples: int = 1024, rings: Sequence[float] = (0.25, 0.5, 0.75)):
    """Least-squares polynomial h ~ log fo on the disc, interpolating at ``constraints``.

    ``constraints`` holds (b, m): h matches log fo to order m at b. The result is
    symmetrised under both reflections, so exp(h) shares fo's symmetry.
    """
    c, r = disc.center, disc.radius
    # radial spine fixes one branch for every ring
    spine = c + r * np.linspace(0.0, 1.0, 4 * boundary_samples + 1)
    f0 = fo(c)
    spine_log = _tracked_log(fo, spine, complex(np.log(f0)))
    radii = list(rings) + [1.0]
    pts, vals = [], []
    theta = 2.0 * np.pi * np.arange(boundary_samples + 1) / boundary_samples
    for rho in radii:
        k = int(round(rho * 4 * boundary_samples))
        path = c + rho * r * np.exp(1j * theta)
        lg = _tracked_log(fo, path, spine_log[k])
        if abs(lg[-1] - lg[0]) > 1e-6:
            raise BranchTrackingFailure("log f_o is not single-valued on the disc")
        pts.append(path[:-1])
        vals.append(lg[:-1])
    for ex in excluded:
        if abs(ex.center - c) + ex.radius < r:
            path = ex.center + ex.radius * np.exp(1j * theta)
            near = int(np.argmin(np.abs(spine - path[0])))
            lg = _tracked_log(fo, path, spine_log[near])
            if abs(lg[-1] - lg[0]) > 1e-6:
                raise BranchTrackingFailure(
                    "f_o has zeros inside the working disc; no zero-free fit exists")
            pts.append(path[:-1])
            vals.append(lg[:-1])
    z = np.concatenate(pts)
    y = np.concatenate(vals)
    keep = np.ones(z.size, dtype=bool)
    for ex in excluded:
        keep &= np.abs(z - ex.center) > ex.radius
    z, y = z[keep], y[keep]

    # scaled monomials (u/r)^k keep the design matrix well conditioned
    u = (z - c) / r
    k = np.arange(degree + 1)
    design = u[:, None] ** k[None, :]
    rows, rhs = [], []
    for b, m in constraints:
        lb = _log_series(fo.taylor(b, m))
        lb[0] = _branch_at(fo, b, c, f0, lb[0])
        ub = (b - c) / r
        for j in range(m):
            # coefficient of (z-b)^j in sum x_k ((z-c)/r)^k
            coef = np.array([_binom(kk, j) * ub ** (kk - j) / r ** j if kk >= j else 0.0
                             for kk in k], dtype=np.complex128)
            rows.append(coef)
            rhs.append(lb[j])
    x = _constrained_lstsq(design, y, np.array(rows).reshape(-1, degree + 1),
                           np.array(rhs, dtype=np.complex128))
    h = Polynomial(x / r ** k, c)
    h = _symmetrize(h)
    resid = float(np.max(np.abs(h(z) - y)))
    return h, resid, int(z.size)


def _branch_at(fo, b, c, f0, principal):
    path = c + (b - c) * np.linspace(0.0, 1.0, 2049)
    lg = _tracked_log(fo, path, complex(np.log(f0)))
    return principal + 2j * np.pi * np.round((lg[-1].imag - principal.imag) / (2 * np.pi))


def _binom(n, k):
    return float(comb(int(n), int(k)))


def _constrained_lstsq(a, y, crow, cval):
    """min ||a x - y|| subject to crow x = cval (null-space method)."""
    if crow.size == 0:
        x, *_ = np.linalg.lstsq(a, y, rcond=None)
        return x
    xp, *_ = np.linalg.lstsq(crow, cval, rcond=None)
    _, sv, vh = np.linalg.svd(crow)
    rank = int(np.sum(sv > sv[0] * 1e-12))
    null = vh[rank:].conj().T
    z, *_ = np.linalg.lstsq(a @ null, y - a @ xp, rcond=None)
    return xp + null @ z


def _symmetrize(h: Polynomial) -> Polynomial:
    """(h(z) + h(1-z))/2, then (h(z) + conj h(conj z))/2; exact in the 1/2-centred basis."""
    h = (h + point_flip(h)) * 0.5
    return (h + conj_flip(h)) * 0.5


def restore(g_minus: LFunctionHandle, f_o: Polynomial, disc: DiscRegion,
            excluded: Sequence[DiscRegion], eps: float, *, degree: int = 40,
            boundary_samples: int = 1024, interior: int = 4096, seed: int = 0) -> RestoreResult:
    """g_plus = (exp(h) / f_o) * g_minus with exp(h) ~ f_o on the disc."""
    if f_o.degree == 0 and f_o.coeffs[0] == 1.0:
        zero = Polynomial.constant(0.0, disc.center)
        return RestoreResult(g_minus, zero, g_minus, f_o, 0.0, 0.0, 0)
    # exp(h) must interpolate f_o at the poles of the base and their reflections
    poles = [(b, m) for b, m in g_minus.poles() if disc.contains(b, strict=True)]
    constraints = list(InterpolationSet.symmetric(poles).points)
    h, resid, nsamp = fit_log(f_o, disc, degree=degree, excluded=excluded,
                              constraints=constraints, boundary_samples=boundary_samples)
    g_plus = replace(g_minus, exp_shift=h, divisor=f_o)
    # closeness on K minus the excluded discs, including near the poles
    extra = []
    for b, _ in constraints:
        extra += [b + rr * np.exp(1j * th) for rr in (1e-2, 1e-4, 1e-6) for th in (0.3, 2.0)]
    pts = disc.interior_samples(interior, seed=seed, extra=extra)
    pts = np.concatenate([pts, disc.boundary(boundary_samples)])
    for ex in excluded:
        pts = pts[np.abs(pts - ex.center) > ex.radius]
    base = g_minus.base_value(pts)
    other = 1.0 if g_minus.multiplier is None or _same_poly(g_minus.multiplier, f_o) \
        else g_minus.multiplier(pts) / f_o(pts)
    diff = np.abs((np.exp(h(pts)) - f_o(pts)) * base * other)
    closeness = float(diff.max())
    if not closeness < eps:
        raise FitResidualTooLarge(
            f"|g_plus - g_minus| reaches {closeness:.3g} >= eps={eps:g}; raise the degree")
    return RestoreResult(g_plus, h, g_minus, f_o, closeness, resid, int(pts.size))


@dataclass
class ProductDecomposition:
    b: LFunctionHandle
    zeta_plus: LFunctionHandle
    target: LFunctionHandle

    def identity_residual(self, pts) -> float:
        pts = np.asarray(pts, dtype=np.complex128)
        lhs = np.asarray(self.b(pts)) * np.asarray(self.zeta_plus(pts))
        tgt = np.asarray(self.target(pts))
        return float(np.max(np.abs(lhs - tgt) / (1.0 + np.abs(tgt))))

    def __iter__(self):
        return iter((self.b, self.zeta_plus))


def product_decomposition(record: RestoreResult) -> ProductDecomposition:
    """b = f_o exp(-h), zeta_plus = g_plus, so that b * zeta_plus = g_minus."""
    b = LFunctionHandle("constant_one", multiplier=record.f_o, exp_shift=-record.h)
    return ProductDecomposition(b, record.g_plus, record.g_minus)


# --------------------------------------------------------------------------
# homotopy

@dataclass(frozen=True)
class AffineBlend:
    """(1 - t) f + t g."""

    f: Callable
    g: Callable
    t: float

    def __call__(self, z):
        if self.t == 0.0:
            return self.f(z)
        if self.t == 1.0:
            return self.g(z)
        return (1.0 - self.t) * np.asarray(self.f(z)) + self.t * np.asarray(self.g(z))


@dataclass(frozen=True)
class PathPoint:
    t: float
    handle: AffineBlend


def path(f: Callable, g: Callable, t: float) -> PathPoint:
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    return PathPoint(float(t), AffineBlend(f, g, float(t)))
