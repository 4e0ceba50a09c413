import os
import subprocess
import sys

import numpy as np
import pytest

from lambda_forge import _accel, kernels

R = np.random.default_rng(7)


def _pairs():
    z = R.uniform(0.5, 40, 300) + 1j * R.uniform(-50, 50, 300)
    s = R.uniform(-3, 5, 300) + 1j * R.uniform(-45, 45, 300)
    nt = (64 + np.ceil(np.abs(s))).astype(np.int64)
    co = np.ascontiguousarray(kernels.EM_COEFFS[:13])
    poly = R.normal(size=40) + 1j * R.normal(size=40)
    u = R.uniform(-1.5, 1.5, 300) + 1j * R.uniform(-1.5, 1.5, 300)
    d = R.normal(size=80) + 1j * R.normal(size=80)
    logn = np.log(np.arange(1, 81, dtype=float))
    w = R.uniform(0.0, 2.0, 300) + 1j * R.uniform(-20, 20, 300)
    return {
        "loggamma": (kernels.nb_lanczos_loggamma, kernels.np_lanczos_loggamma, (z,), 1e-14),
        "hurwitz": (lambda *a: kernels.nb_hurwitz_em(*a)[0], lambda *a: kernels.np_hurwitz_em(*a)[0],
                    (s, 0.3, nt, co), 1e-9),
        "hurwitz_regular": (lambda *a: kernels.nb_hurwitz_em(*a, True)[0],
                            lambda *a: kernels.np_hurwitz_em(*a, True)[0], (s, 0.7, nt, co), 1e-9),
        "horner": (kernels.nb_horner, kernels.np_horner, (poly, u), 1e-13),
        "dirichlet_sum": (kernels.nb_dirichlet_sum, kernels.np_dirichlet_sum, (d, logn, w), 1e-13),
    }


@pytest.mark.parametrize("name", list(_pairs()))
def test_numba_and_numpy_paths_agree(name):
    nb_fn, np_fn, args, tol = _pairs()[name]
    a, b = nb_fn(*args), np_fn(*args)
    assert np.max(np.abs(a - b) / (1 + np.abs(b))) < tol


def test_hurwitz_error_estimates_agree():
    s = np.array([2.0 + 0j, -1.5 + 10j, 0.5 + 40j])
    nt = np.array([64, 80, 104], dtype=np.int64)
    co = np.ascontiguousarray(kernels.EM_COEFFS[:13])
    _, e1 = kernels.nb_hurwitz_em(s, 1.0, nt, co)
    _, e2 = kernels.np_hurwitz_em(s, 1.0, nt, co)
    np.testing.assert_allclose(e1, e2, rtol=1e-10)


def test_bernoulli_table():
    # B2/2! = 1/12, B4/4! = -1/720, B6/6! = 1/30240
    np.testing.assert_allclose(kernels.EM_COEFFS[:3], [1 / 12, -1 / 720, 1 / 30240], rtol=1e-15)


def test_dispatch_matches_flag():
    assert kernels.horner is (kernels.nb_horner if _accel.USE_NUMBA else kernels.np_horner)


@pytest.mark.parametrize("value,expected", [("1", True), ("true", True), ("", False), ("0", False)])
def test_env_flag_selects_numpy(value, expected):
    code = ("from lambda_forge import _accel, kernels;"
            "print(_accel.DISABLED, kernels.horner is kernels.np_horner)")
    env = dict(os.environ, LAMBDA_FORGE_NO_NUMBA=value)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out[0] == str(expected)
    if expected:
        assert out[1] == "True"


def test_numpy_fallback_end_to_end():
    """The zeta pipeline gives the same numbers with numba switched off."""
    code = ("import numpy as np; from lambda_forge import zeta, gamma;"
            "print(repr(complex(zeta(0.3+2j))), repr(complex(gamma(1+1j))))")
    outs = []
    for flag in ("1", "0"):
        env = dict(os.environ, LAMBDA_FORGE_NO_NUMBA=flag)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout.split())
    for a, b in zip(*outs):
        assert abs(complex(a) - complex(b)) < 1e-13
