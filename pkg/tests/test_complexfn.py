import math

import numpy as np
import pytest

from lambda_forge import complexfn as cf
from lambda_forge.errors import (
    AccuracyNotReached,
    DomainError,
    Overflow,
    PoleAtNonPositiveInteger,
    PoleAtOne,
)
from lambda_forge.perturb import LFunctionHandle

from conftest import cval

XI = cf.FunctionalEquation()
MOD4 = cf.DirichletCharacter.kronecker(-4)


# ---------------------------------------------------------------- gamma

def test_gamma_integer_and_half():
    assert abs(cf.gamma(5 + 0j) - 24) < 24 * 1e-13
    assert abs(cf.gamma(0.5) - math.sqrt(math.pi)) < 1e-13


def test_gamma_one_plus_i(oracles):
    ref = cval(oracles["gamma_1_plus_i"])
    assert abs(cf.gamma(1 + 1j) - ref) / abs(ref) < 1e-12


def test_gamma_matches_factorials():
    for n in range(1, 30):
        assert abs(cf.gamma(n) - math.factorial(n - 1)) / math.factorial(n - 1) < 1e-12


def test_gamma_recurrence_across_reflection_cut():
    s = np.array([0.3 + 2j, -2.7 + 0.4j, 0.49 - 5j, 12.2 + 30j])
    np.testing.assert_allclose(cf.gamma(s + 1), s * cf.gamma(s), rtol=1e-12)


def test_gamma_reflection_identity_random():
    rng = np.random.default_rng(11)
    r = 20 * np.sqrt(rng.uniform(size=1000))
    s = r * np.exp(2j * np.pi * rng.uniform(size=1000))
    s = s[np.abs(s - np.round(s.real)) > 0.05]
    val = cf.gamma(s) * cf.gamma(1 - s) * np.sin(np.pi * s) / np.pi
    assert np.max(np.abs(val - 1)) < 1e-10


def test_loggamma_conjugate_symmetry():
    s = np.array([0.2 + 40j, -3.3 + 1j, 7 - 2j])
    np.testing.assert_allclose(cf.loggamma(np.conj(s)), np.conj(cf.loggamma(s)), rtol=1e-14)


@pytest.mark.parametrize("s", [0, -1, -7, -30])
def test_gamma_poles(s):
    with pytest.raises(PoleAtNonPositiveInteger):
        cf.gamma(complex(s))


def test_gamma_overflow():
    with pytest.raises(Overflow):
        cf.gamma(200.0)


# ---------------------------------------------------------------- zeta

def test_zeta_closed_forms(oracles):
    assert abs(cf.zeta(2) - math.pi ** 2 / 6) < 1e-10
    assert abs(cf.zeta(-1) + 1 / 12) < 1e-10
    assert abs(cf.zeta(3) - oracles["zeta_3"]) < 1e-12
    assert abs(cf.zeta(-2)) < 1e-12  # trivial zero


@pytest.mark.parametrize("key", ["0.3,2.0", "0.5,10.0", "2.5,-7.0", "3.0,55.0", "-1.5,0.5"])
def test_zeta_against_mpmath(oracles, key):
    re, im = map(float, key.split(","))
    ref = cval(oracles["zeta_samples"][key])
    assert abs(cf.zeta(complex(re, im)) - ref) < 1e-11


def test_zeta_deep_left_halfplane(oracles):
    # rounding in the direct sum limits accuracy to a few 1e-11 here
    for key in ("-2.0,30.0", "-2.0,60.0", "-4.0,3.0"):
        re, im = map(float, key.split(","))
        ref = cval(oracles["zeta_samples"][key])
        assert abs(cf.zeta(complex(re, im)) - ref) < 1e-12 * max(1.0, abs(ref)) + 5e-11


def test_zeta_first_zero():
    assert abs(cf.zeta(0.5 + 14.134725141734694j)) < 1e-6


def test_zeta_matches_direct_sum():
    rng = np.random.default_rng(3)
    s = rng.uniform(2, 6, 50) + 1j * rng.uniform(-20, 20, 50)
    n = np.arange(1, 200001, dtype=float)
    for z in s:
        direct = np.sum(n ** -z)
        tail = 200000.0 ** (1 - z) / (z - 1)  # integral estimate of the rest
        assert abs(cf.zeta(z) - (direct + tail)) < 1e-10


def test_zeta_pole():
    with pytest.raises(PoleAtOne):
        cf.zeta(1.0)
    with pytest.raises(PoleAtOne):
        cf.zeta(np.array([2.0, 1.0]))


def test_zeta_accuracy_guard():
    params = cf.EvalParams(em_terms=8, em_bernoulli=2, target_abs_tol=1e-15)
    with pytest.raises(AccuracyNotReached):
        cf.zeta(0.5 + 50j, params)


def test_zeta_array_shape():
    s = np.full((3, 4), 2.0 + 0j)
    out = cf.zeta(s)
    assert out.shape == (3, 4)
    assert np.allclose(out, math.pi ** 2 / 6)


@pytest.mark.parametrize("kw", [dict(em_terms=4), dict(em_bernoulli=31), dict(target_abs_tol=0)])
def test_eval_params_invariants(kw):
    with pytest.raises(DomainError):
        cf.EvalParams(**kw)


# ---------------------------------------------------------------- Hurwitz

def test_hurwitz_examples(oracles):
    assert abs(cf.hurwitz_zeta(2, 1.0) - oracles["zeta_2"]) < 1e-12
    assert abs(cf.hurwitz_zeta(2, 0.5) - oracles["hurwitz_2_half"]) < 1e-12
    assert abs(cf.hurwitz_zeta(3, 0.25) - oracles["hurwitz_3_quarter"]) < 1e-10


def test_hurwitz_against_partial_sum():
    n = np.arange(0, 100000, dtype=float)
    direct = np.sum((n + 0.25) ** -3.0)
    tail = 0.5 * (100000 + 0.25) ** -2.0  # tail integral
    assert abs(cf.hurwitz_zeta(3, 0.25) - (direct + tail)) < 1e-10


def test_hurwitz_half_identity():
    s = cf.grid((-2.5, 4.0), (-25.0, 25.0), 9, 9, exclude=((1.0, 0.2),))
    lhs = cf.hurwitz_zeta(s, 0.5)
    rhs = (2.0 ** s - 1) * cf.zeta(s)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


@pytest.mark.parametrize("a", [0.0, -0.2, 1.5])
def test_hurwitz_domain(a):
    with pytest.raises(DomainError):
        cf.hurwitz_zeta(2.0, a)


def test_hurwitz_pole():
    with pytest.raises(PoleAtOne):
        cf.hurwitz_zeta(1.0, 0.3)


# ---------------------------------------------------------------- Dirichlet

def test_character_tables():
    assert MOD4.values == (0, 1, 0, -1)
    assert MOD4.parity_delta == 1
    chi5 = cf.DirichletCharacter.kronecker(5)
    assert chi5.values == (0, 1, -1, -1, 1)
    assert chi5.parity_delta == 0
    assert cf.DirichletCharacter.principal(1).is_principal


@pytest.mark.parametrize("values", [(0, 1, 0, 1, 0), (0, 1, 1, -1, 1), (0, 2, 0, -2)])
def test_character_invariants(values):
    with pytest.raises(DomainError):
        cf.DirichletCharacter(len(values), values)


def test_catalan(oracles):
    assert abs(cf.dirichlet_l(MOD4, 2.0) - oracles["catalan"]) < 1e-12


def test_l_mod4_off_axis(oracles):
    ref = cval(oracles["l_mod4_half_plus_i"])
    assert abs(cf.dirichlet_l(MOD4, 0.5 + 1j) - ref) < 1e-11


def test_principal_mod1_is_zeta():
    chi = cf.DirichletCharacter.principal(1)
    s = cf.grid((-2.0, 3.0), (-30.0, 30.0), 15, 15, exclude=((1.0, 0.05),))
    assert np.max(np.abs(cf.dirichlet_l(chi, s) - cf.zeta(s))) < 1e-12
    assert abs(cf.dirichlet_l(chi, 3.0) - cf.zeta(3.0)) < 1e-12


def test_principal_pole_only():
    with pytest.raises(PoleAtOne):
        cf.dirichlet_l(cf.DirichletCharacter.principal(3), 1.0)
    # L(1, chi_-4) = pi/4
    assert abs(cf.dirichlet_l(MOD4, 1.0) - math.pi / 4) < 1e-12


def test_dirichlet_sum_of_hurwitz():
    s = 0.7 + 3j
    chi = cf.DirichletCharacter.kronecker(5)
    ref = 5 ** -s * sum(chi(r) * cf.hurwitz_zeta(s, r / 5) for r in range(1, 6))
    assert abs(cf.dirichlet_l(chi, s) - ref) < 1e-11


@pytest.mark.parametrize("disc", [-4, 5, -3, 8, -8, 12])
def test_dirichlet_functional_equation(disc):
    chi = cf.DirichletCharacter.kronecker(disc)
    eq = cf.FunctionalEquation(cf.dirichlet_q(chi), 1, conjugated=True)
    f = LFunctionHandle.dirichlet(chi)
    s = cf.grid((-1.0, 2.0), (-20.0, 20.0), 8, 8)
    assert np.max(cf.fe_residual(f, eq, s)) < 1e-8


def test_mod4_fe_example():
    eq = cf.FunctionalEquation(cf.dirichlet_q(MOD4), 1, conjugated=True)
    assert cf.fe_residual(LFunctionHandle.dirichlet(MOD4), eq, 0.5 + 1j) < 1e-8


# ---------------------------------------------------------------- Q factors

def test_q_trivial():
    assert cf.q_eval(cf.QFactor(), 3.7 - 2j) == pytest.approx(1.0)


def test_q_riemann_at_one():
    q = cf.QFactor(k=0.5641895835477563, factors=((0.5, 0.0),))
    assert abs(cf.q_eval(q, 1.0) - 1.0) < 1e-14


def test_q_mod4(oracles):
    q = cf.dirichlet_q(MOD4)
    termwise = (4 / math.pi) ** 0.75 * math.gamma(0.75)
    assert abs(cf.q_eval(q, 0.5) - termwise) < 1e-14
    assert abs(cf.q_eval(q, 0.5) - oracles["q_mod4_at_half"]) < 1e-14


@pytest.mark.parametrize("kw", [dict(k=0.0), dict(factors=((0.0, 0),)), dict(factors=((1.0, -0.5),))])
def test_qfactor_invariants(kw):
    with pytest.raises(DomainError):
        cf.QFactor(**kw)


def test_q_pole():
    with pytest.raises(PoleAtNonPositiveInteger):
        cf.q_eval(cf.riemann_q(), -2.0)


def test_functional_equation_sign():
    with pytest.raises(DomainError):
        cf.FunctionalEquation(sign=0)


# ---------------------------------------------------------------- completed functions

def test_lambda_trivial():
    assert cf.lambda_eval(LFunctionHandle.one(), cf.FunctionalEquation(cf.QFactor()), 2 + 5j) == 1


def test_xi_reflection_pair():
    z = LFunctionHandle.zeta()
    a = cf.lambda_eval(z, XI, 0.3 + 2j)
    b = cf.lambda_eval(z, XI, 0.7 - 2j)
    assert abs(a - b) < 1e-8


def test_xi_zero():
    assert abs(cf.lambda_eval(LFunctionHandle.zeta(), XI, 0.5 + 14.134725141734694j)) < 1e-6


def test_lambda_log_consistent():
    z = LFunctionHandle.zeta()
    s = np.array([0.3 + 2j, 2.0 + 10j, -1.0 - 7j])
    np.testing.assert_allclose(np.exp(cf.lambda_log(z, XI, s)), cf.lambda_eval(z, XI, s), rtol=1e-12)


def test_fe_residual_zeta_point():
    assert cf.fe_residual(LFunctionHandle.zeta(), XI, 0.25 + 3j) < 1e-8


def test_fe_residual_zeta_grid():
    s = cf.grid((-2.0, 3.0), (-30.0, 30.0), 20, 20, exclude=((0.0, 0.1), (1.0, 0.1)))
    assert s.size == 400
    assert np.max(cf.fe_residual(LFunctionHandle.zeta(), XI, s)) < 1e-8


def test_fe_residual_antisymmetric():
    eq = cf.FunctionalEquation(cf.QFactor(), -1)
    f = LFunctionHandle.synthetic_fn("antisymmetric_quintic")
    s = cf.grid((-3.0, 4.0), (-5.0, 5.0), 11, 11)
    assert np.max(cf.fe_residual(f, eq, s)) < 1e-12
    # the same function fails the symmetric equation
    assert np.max(cf.fe_residual(f, cf.FunctionalEquation(cf.QFactor()), s)) > 0.1


def test_fe_residual_detects_asymmetry():
    eq = cf.FunctionalEquation(cf.QFactor())
    assert cf.fe_residual(LFunctionHandle.synthetic_fn("identity"), eq, 2.0) > 0.5


def test_grid_exclusion():
    g = cf.grid((0, 1), (0, 1), 3, 3, exclude=((0.5 + 0.5j, 0.1),))
    assert g.size == 8 and 0.5 + 0.5j not in g
