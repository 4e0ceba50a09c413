import numpy as np
import pytest

from lambda_forge import complexfn as cf
from lambda_forge.errors import (
    DegreeMismatch,
    DomainError,
    NoConvergence,
    SamplingBudgetExceeded,
    SymmetryViolation,
    ZeroOnBoundary,
)
from lambda_forge.interpolation import DiscRegion
from lambda_forge.perturb import LFunctionHandle
from lambda_forge.symmetry import Polynomial
from lambda_forge.zeros import (
    RectRegion,
    WeilPolynomial,
    completed_winding,
    critical_scan,
    locate_zeros,
    refine_zero,
    weil_check,
    winding_count,
    winding_trace,
)

XI = cf.FunctionalEquation()
ZETA = LFunctionHandle.zeta()
BOX = RectRegion(-1.0, 1.0, -1.0, 1.0)


def xi(s):
    return cf.lambda_eval(ZETA, XI, s)


def weil_from_roots(roots, q):
    """P(t) = prod (1 - t / alpha) with real coefficients."""
    c = np.ones(1, dtype=np.complex128)
    for a in roots:
        c = np.convolve(c, [1.0, -1.0 / a])
    return WeilPolynomial(tuple(np.real(c)), q, len(roots) // 2)


def random_weil(rng, genus, q, bad=False):
    angles = rng.uniform(0.05, np.pi - 0.05, genus)
    alphas = q ** -0.5 * np.exp(1j * angles)
    if bad:
        alphas[0] *= 1.01
    return weil_from_roots(np.concatenate([alphas, np.conj(alphas)]), q)


# ---------------------------------------------------------------- winding counts

def test_winding_simple_zero():
    c = 0.2 + 0.1j
    assert winding_count(lambda z: z - c, BOX) == 1
    assert winding_count(lambda z: z - 3.0, BOX) == 0
    assert winding_count(lambda z: 1 / (z - c), BOX) == -1


def test_winding_multiplicity():
    c1, c2 = 0.1 + 0.2j, -0.4 - 0.3j
    assert winding_count(lambda z: (z - c1) ** 2 * (z - c2), BOX) == 3


def test_winding_disc():
    assert winding_count(lambda z: (z - 0.5) * (z - 0.6j), DiscRegion(0.5, 0.3)) == 1
    assert winding_count(lambda z: (z - 0.5) * (z - 0.6j), DiscRegion(0.3, 1.0)) == 2


def test_winding_completed_zeta():
    assert completed_winding(ZETA, XI, RectRegion(0.0, 1.0, 10.0, 30.0)) == 3
    assert winding_count(xi, RectRegion(0.0, 1.0, 10.0, 30.0)) == 3


def test_winding_zeta_declared_pole():
    # zeta alone: zero-free near 1 but with the pole, so -1
    assert winding_count(ZETA, DiscRegion(1.0, 0.2)) == -1


def test_winding_zero_on_boundary():
    with pytest.raises(ZeroOnBoundary):
        winding_count(lambda z: z - 1.0, BOX)
    with pytest.raises(ZeroOnBoundary):
        winding_count(lambda z: z - (1.0 + 0.3j), BOX)


def test_winding_sampling_budget():
    with pytest.raises(SamplingBudgetExceeded):
        winding_count(lambda z: z ** 40, BOX, init_samples=64, max_samples=100)
    assert winding_count(lambda z: z ** 40, BOX, init_samples=64) == 40


def test_winding_trace_metadata():
    tr = winding_trace(lambda z: (z - 0.1) ** 5, BOX, 8)
    assert tr.winding == 5 and tr.samples > 9


def test_winding_log_mode_matches():
    f = lambda z: (z - 0.1j) * (z + 0.5)
    assert winding_count(lambda z: np.log(f(z)), BOX, log=True) == winding_count(f, BOX) == 2


def test_winding_smooth_term():
    """A fast-rotating exp(h) would alias without the smooth channel."""
    h = Polynomial([0.0, 0.0, 0.0, 40j], center=0.0)
    f = lambda z: (z - 0.2) * np.exp(h(z))
    assert winding_count(lambda z: z - 0.2, BOX, smooth=h) == 1
    assert winding_count(f, BOX, init_samples=1024) == 1


@pytest.mark.parametrize("seed", range(4))
def test_winding_random_polynomials(seed):
    rng = np.random.default_rng(100 + seed)
    for _ in range(50):
        deg = int(rng.integers(1, 9))
        roots = rng.uniform(-1.5, 1.5, deg) + 1j * rng.uniform(-1.5, 1.5, deg)
        # keep every root a clear distance from the contour
        edge = np.minimum(np.abs(np.abs(roots.real) - 1.0), np.abs(np.abs(roots.imag) - 1.0))
        roots = roots[edge > 1e-3]
        inside = int(np.sum((np.abs(roots.real) < 1) & (np.abs(roots.imag) < 1)))
        p = Polynomial.from_roots(roots, 0.0)
        assert winding_count(p, BOX) == inside


def test_winding_additive():
    rng = np.random.default_rng(9)
    for _ in range(20):
        roots = rng.uniform(-0.9, 0.9, 6) + 1j * rng.uniform(-0.9, 0.9, 6)
        p = Polynomial.from_roots(roots, 0.0)
        cut = 0.0137
        if np.min(np.abs(roots.real - cut)) < 1e-6:
            continue
        left = winding_count(p, RectRegion(-1, cut, -1, 1))
        right = winding_count(p, RectRegion(cut, 1, -1, 1))
        assert left + right == winding_count(p, BOX) == 6


def test_rect_validation():
    with pytest.raises(DomainError):
        RectRegion(1.0, 0.0, 0.0, 1.0)


# ---------------------------------------------------------------- refinement

def test_refine_square_root():
    z, r = refine_zero(lambda z: z * z - 1, 1.1)
    assert abs(z - 1) < 1e-12 and r < 1e-12


def test_refine_xi_zero(oracles):
    z, r = refine_zero(xi, 0.5 + 14j)
    assert abs(z - (0.5 + 1j * oracles["zeta_zero_heights"][0])) < 1e-8
    assert r < 1e-8


def test_refine_no_convergence():
    with pytest.raises(NoConvergence):
        refine_zero(np.exp, 0.0)


def test_locate_zeros_polynomial():
    roots = [0.3 + 0.2j, -0.5 - 0.1j, 0.31 + 0.21j]
    p = Polynomial.from_roots(roots, 0.0)
    rep = locate_zeros(p, BOX)
    assert rep.winding == 3 and len(rep.refined_zeros) == 3
    found = sorted((z for z, _ in rep.refined_zeros), key=lambda z: (z.real, z.imag))
    for z, ref in zip(found, sorted(roots, key=lambda z: (z.real, z.imag))):
        assert abs(z - ref) < 1e-10
    d = rep.to_dict()
    assert d["zeros"] == 3 and len(d["refined_zeros"]) == 3


def test_locate_zeros_on_midpoint_cut():
    # the zero sits exactly where the first split would cut
    p = Polynomial.from_roots([0.0 + 0.0j], 0.0)
    rep = locate_zeros(p, BOX)
    assert len(rep.refined_zeros) == 1 and abs(rep.refined_zeros[0][0]) < 1e-12


def test_locate_zeros_with_declared_pole():
    rep = locate_zeros(ZETA, RectRegion(0.8, 1.2, -0.2, 0.2), poles=[(1.0, 1)])
    assert rep.winding == -1 and rep.zeros == 0 and rep.refined_zeros == []


def test_locate_zeros_of_xi():
    rep = locate_zeros(xi, RectRegion(0.2, 0.8, 10.0, 30.0),
                       log_f=lambda s: cf.lambda_log(ZETA, XI, s))
    assert rep.winding == 3
    assert np.allclose([z.imag for z, _ in rep.refined_zeros],
                       [14.134725141734695, 21.022039638771556, 25.01085758014569], atol=1e-8)
    assert all(abs(z.real - 0.5) < 1e-8 for z, _ in rep.refined_zeros)


# ---------------------------------------------------------------- critical axis

def test_critical_scan_xi(oracles):
    hs = critical_scan(ZETA, XI, 10.0, 30.0, 0.05)
    assert len(hs) == 3
    assert np.allclose(hs, oracles["zeta_zero_heights"][:3], atol=1e-6)


def test_critical_scan_empty():
    assert critical_scan(ZETA, XI, 0.0, 10.0, 0.05) == []
    assert critical_scan(ZETA, XI, 0.5, 10.0, 0.05) == []


def test_critical_scan_cross_checked_by_windings():
    hs = critical_scan(ZETA, XI, 10.0, 30.0, 0.05)
    edges = [10.0, 17.0, 23.0, 30.0]
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = completed_winding(ZETA, XI, RectRegion(0.25, 0.75, lo, hi))
        assert n == sum(lo < h < hi for h in hs)


def test_critical_scan_heights_refine_in_plane():
    for h in critical_scan(ZETA, XI, 10.0, 30.0, 0.05):
        z, _ = refine_zero(xi, 0.5 + 1j * h)
        assert abs(z - (0.5 + 1j * h)) < 1e-8


def test_critical_scan_dirichlet():
    chi = cf.DirichletCharacter.kronecker(-4)
    eq = cf.FunctionalEquation(cf.dirichlet_q(chi), 1, conjugated=True)
    hs = critical_scan(LFunctionHandle.dirichlet(chi), eq, 1.0, 12.0, 0.05)
    # first zeros of L(s, chi_-4)
    assert np.allclose(hs[:2], [6.020948904697597, 10.243770304166555], atol=1e-6)


def test_critical_scan_symmetry_violation():
    # 1 + 0.2 (s - 1/2) is not real on the critical axis
    skew = LFunctionHandle("riemann_zeta", multiplier=Polynomial([1.0, 0.2]))
    with pytest.raises(SymmetryViolation):
        critical_scan(skew, XI, 10.0, 12.0, 0.05)


def test_critical_scan_arguments():
    with pytest.raises(DomainError):
        critical_scan(ZETA, XI, 5.0, 1.0, 0.05)


# ---------------------------------------------------------------- Weil polynomials

def test_weil_rh_example():
    res = weil_check(WeilPolynomial((1, -1, 2), 2, 1))
    assert res.rh_ok and res.functional_ok
    assert np.allclose(np.abs(res.roots), 2 ** -0.5, atol=1e-12)
    # only the reciprocal form of the coefficient identity holds
    assert res.reciprocal_identity_ok and not res.printed_identity_ok


def test_weil_rh_failure_example():
    res = weil_check(WeilPolynomial((1, -3, 2), 2, 1))
    # roots 1 and 1/2 still pair up under a -> 1/(q a); only RH fails
    assert not res.rh_ok and res.functional_ok
    assert np.allclose(sorted(np.abs(res.roots)), [0.5, 1.0])


def test_weil_trivial():
    ok_fe, ok_rh, roots = weil_check(WeilPolynomial((1,), 3, 0))
    assert ok_fe and ok_rh and roots == []


def test_weil_validation():
    with pytest.raises(DegreeMismatch):
        WeilPolynomial((1, -1, 2), 2, 2)
    with pytest.raises(DomainError):
        WeilPolynomial((2, -1, 2), 2, 1)


@pytest.mark.parametrize("q", [2, 3, 5, 7.0, 9, 25])
def test_weil_randomized(q):
    rng = np.random.default_rng(int(q * 10))
    for _ in range(20):
        g = int(rng.integers(1, 5))
        good = weil_check(random_weil(rng, g, q))
        assert good.functional_ok and good.rh_ok
        assert not weil_check(random_weil(rng, g, q, bad=True)).rh_ok


def test_weil_relabeling_invariance():
    q = 3
    alphas = q ** -0.5 * np.exp(1j * np.array([0.4, 1.9]))
    roots = np.concatenate([alphas, np.conj(alphas)])
    a = weil_check(weil_from_roots(roots, q))
    b = weil_check(weil_from_roots(1 / (q * roots), q))
    assert a.functional_ok == b.functional_ok == True


def test_weil_functional_without_rh():
    # a root pair alpha, 1/(q alpha) with |alpha| != q^-1/2
    q = 2
    a = 0.9
    res = weil_check(weil_from_roots([a, 1 / (q * a)], q))
    assert res.functional_ok and not res.rh_ok
