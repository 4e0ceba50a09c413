"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
expression with identical semantics. The public names at the bottom of the
module are bound to one or the other according to ``_accel.USE_NUMBA``;
both variants stay importable (``nb_*`` / ``np_*``) for benchmarking and
cross-checking.
"""
import math
from fractions import Fraction
from math import comb, factorial

import numpy as np

from ._accel import USE_NUMBA, njit

LANCZOS_G = 7.0
LANCZOS_COEFFS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
HALF_LOG_2PI = 0.91893853320467274178


def _bernoulli_even(count):
    """B_2, B_4, ..., B_{2*count} as exact fractions (Akiyama-Tanigawa)."""
    nmax = 2 * count
    a = [Fraction(0)] * (nmax + 1)
    out = []
    for m in range(nmax + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return out


# B_{2k}/(2k)! for k = 1..31; index k-1.
_BERN = _bernoulli_even(31)
EM_COEFFS = np.array([float(b / factorial(2 * k)) for k, b in enumerate(_BERN, start=1)])
MAX_BERNOULLI = len(EM_COEFFS) - 1


# --------------------------------------------------------------------------
# log-gamma, Lanczos (valid for Re z >= 1/2)

@njit
def nb_lanczos_loggamma(z):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        zz = z[i] - 1.0
        x = LANCZOS_COEFFS[0] + 0j
        for k in range(1, LANCZOS_COEFFS.shape[0]):
            x += LANCZOS_COEFFS[k] / (zz + k)
        t = zz + LANCZOS_G + 0.5
        out[i] = HALF_LOG_2PI + (zz + 0.5) * np.log(t) - t + np.log(x)
    return out


def np_lanczos_loggamma(z):
    zz = np.asarray(z, dtype=np.complex128) - 1.0
    k = np.arange(1, LANCZOS_COEFFS.size)
    x = LANCZOS_COEFFS[0] + (LANCZOS_COEFFS[1:] / (zz[:, None] + k)).sum(axis=1)
    t = zz + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (zz + 0.5) * np.log(t) - t + np.log(x)


# --------------------------------------------------------------------------
# Hurwitz zeta, Euler-Maclaurin. Returns (value, size of first omitted term).

# With ``regular`` set the pole part 1/(s-1) is dropped, so that the result
# is entire in s and finite at s = 1.

@njit
def _pole_tail(si, x, lx, regular):
    # x^{1-s}/(s-1), or (x^{1-s}-1)/(s-1) when regular
    if not regular:
        return np.exp((1.0 - si) * lx) / (si - 1.0)
    w = (1.0 - si) * lx
    if abs(w) < 1e-300:
        return -lx + 0j
    er = math.expm1(w.real)
    c = math.cos(w.imag)
    sn = math.sin(w.imag)
    half = math.sin(0.5 * w.imag)
    em1 = complex(er * c - 2.0 * half * half, (er + 1.0) * sn)
    return em1 / (w / -lx)


@njit
def nb_hurwitz_em(s, a, nterms, coeffs, regular=False):
    m = s.shape[0]
    nb = coeffs.shape[0] - 1
    val = np.empty(m, dtype=np.complex128)
    err = np.empty(m, dtype=np.float64)
    for i in range(m):
        si = s[i]
        n_i = nterms[i]
        acc = 0j
        for n in range(n_i):
            acc += np.exp(-si * np.log(n + a))
        x = n_i + a
        lx = np.log(x)
        xs = np.exp(-si * lx)
        acc += _pole_tail(si, x, lx, regular) + 0.5 * xs
        # rising factorial s(s+1)...(s+2k-2) times x^{-s-2k+1}
        rising = si
        xpow = xs / x
        for k in range(nb):
            acc += coeffs[k] * rising * xpow
            rising *= (si + 2 * k + 1) * (si + 2 * k + 2)
            xpow /= x * x
        val[i] = acc
        err[i] = abs(coeffs[nb] * rising * xpow)
    return val, err


def _np_pole_tail(s, lx, regular):
    if not regular:
        return np.exp((1.0 - s) * lx) / (s - 1.0)
    w = (1.0 - s) * lx
    er = np.expm1(w.real)
    half = np.sin(0.5 * w.imag)
    em1 = (er * np.cos(w.imag) - 2.0 * half * half) + 1j * (er + 1.0) * np.sin(w.imag)
    tiny = np.abs(w) < 1e-300
    safe = np.where(tiny, 1.0, w)
    return np.where(tiny, -lx + 0j, em1 / (safe / -lx))


def np_hurwitz_em(s, a, nterms, coeffs, regular=False):
    s = np.asarray(s, dtype=np.complex128)
    nterms = np.asarray(nterms, dtype=np.int64)
    nb = coeffs.size - 1
    nmax = int(nterms.max()) if nterms.size else 0
    val = np.empty(s.size, dtype=np.complex128)
    err = np.empty(s.size, dtype=np.float64)
    logs = np.log(np.arange(nmax) + a)
    chunk = max(1, 2_000_000 // max(nmax, 1))
    for lo in range(0, s.size, chunk):
        sl = slice(lo, lo + chunk)
        sc = s[sl]
        mask = np.arange(nmax)[None, :] < nterms[sl, None]
        terms = np.exp(-sc[:, None] * logs[None, :])
        acc = np.where(mask, terms, 0).sum(axis=1)
        x = nterms[sl] + a
        lx = np.log(x)
        xs = np.exp(-sc * lx)
        acc = acc + _np_pole_tail(sc, lx, regular) + 0.5 * xs
        rising = sc.copy()
        xpow = xs / x
        for k in range(nb):
            acc = acc + coeffs[k] * rising * xpow
            rising = rising * (sc + 2 * k + 1) * (sc + 2 * k + 2)
            xpow = xpow / (x * x)
        val[sl] = acc
        err[sl] = np.abs(coeffs[nb] * rising * xpow)
    return val, err


# --------------------------------------------------------------------------
# Horner evaluation of sum c_k u^k

@njit
def nb_horner(coeffs, u):
    out = np.empty(u.shape[0], dtype=np.complex128)
    n = coeffs.shape[0]
    for i in range(u.shape[0]):
        acc = 0j
        ui = u[i]
        for k in range(n - 1, -1, -1):
            acc = acc * ui + coeffs[k]
        out[i] = acc
    return out


def np_horner(coeffs, u):
    u = np.asarray(u, dtype=np.complex128)
    acc = np.zeros_like(u)
    for c in coeffs[::-1]:
        acc = acc * u + c
    return acc


@njit
def nb_dirichlet_sum(coeffs, logn, z):
    """sum_n coeffs[n] * exp(-z * logn[n]) at each z."""
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        zi = z[i]
        acc = 0j
        for k in range(coeffs.shape[0]):
            acc += coeffs[k] * np.exp(-zi * logn[k])
        out[i] = acc
    return out


def np_dirichlet_sum(coeffs, logn, z, chunk=512):
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(0, z.shape[0], chunk):
        out[i:i + chunk] = np.exp(-np.outer(z[i:i + chunk], logn)) @ coeffs
    return out


if USE_NUMBA:
    lanczos_loggamma = nb_lanczos_loggamma
    hurwitz_em = nb_hurwitz_em
    horner = nb_horner
    dirichlet_sum = nb_dirichlet_sum
else:
    lanczos_loggamma = np_lanczos_loggamma
    hurwitz_em = np_hurwitz_em
    horner = np_horner
    dirichlet_sum = np_dirichlet_sum


def binomial_row(n):
    return np.array([comb(n, k) for k in range(n + 1)], dtype=np.float64)
