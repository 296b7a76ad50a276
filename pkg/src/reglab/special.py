"""Clausen's function, digamma, the Mellin kernel, and two Eisenstein integrals.

The integrals

    int_0^oo (e_{a,b}(it) + e_{a,-b}(it) - h_a) t dt       = i Cl2(2 pi a/N) B(b/N)
    int_0^oo (1/(iNt)) d S_{a,b}(1/(N^2 t))               = -i Cl2(2 pi a/N) h_b

are available both in closed form and by quadrature, where
S_{a,b}(u) = sum_m (zeta^(am) - zeta^(-am))/m sum_{n = +-b} (+-1) e^(-2 pi m n u).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import zeta as _hurwitz_zeta

from .cyclotomic import cyc_halfcot
from .eisenstein import eisenstein_coeffs, eisenstein_tilde_coeffs
from .qseries import divisor_pairs
from .quadrature import NumericResult, exp_trapezoid, terms_for_tail
from .siegel import bernoulli_b2

__all__ = [
    "clausen2",
    "digamma",
    "mellin_kernel",
    "lemma3_closed",
    "lemma3_numeric",
    "lemma4_closed",
    "lemma4_numeric",
]

TWO_PI = 2 * math.pi


@lru_cache(maxsize=1)
def _clausen_coeffs(n_terms: int = 40) -> np.ndarray:
    # zeta(2n) / (n (2n+1) (2 pi)^(2n)), the Taylor coefficients of the regular part
    n = np.arange(1, n_terms + 1)
    z = _hurwitz_zeta(2.0 * n, 1.0)
    return z / (n * (2 * n + 1) * TWO_PI ** (2 * n))


def clausen2(x: float) -> float:
    """Cl2(x) = sum_{m>=1} sin(m x)/m^2.

    After reducing to [0, pi] with periodicity and oddness, uses
    Cl2(t) = t - t log t + sum_n zeta(2n) t^(2n+1) / (n (2n+1) (2 pi)^(2n)),
    which converges at least like 4^-n on that range.
    """
    x = math.fmod(float(x), TWO_PI)
    if x < 0:
        x += TWO_PI
    sign = 1.0
    if x > math.pi:
        x = TWO_PI - x
        sign = -1.0
    if x == 0.0 or x == math.pi:
        return 0.0
    c = _clausen_coeffs()
    powers = x ** (2 * np.arange(1, c.size + 1) + 1)
    return sign * (x - x * math.log(x) + math.fsum(c * powers))


_ASYMPTOTIC_B2K = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
                   Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6)]


def digamma(x: float) -> float:
    """psi(x) for x > 0: upward recurrence to x >= 10, then the asymptotic series."""
    if not x > 0:
        raise ValueError(f"digamma implemented for x > 0 only, got {x}")
    shift = 0.0
    while x < 10:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for k, b in enumerate(_ASYMPTOTIC_B2K, start=1):
        series += float(b) / (2 * k) * p
        p *= inv2
    return shift + math.log(x) - 0.5 / x - series


def mellin_kernel(s: int, k: float) -> float:
    """int_0^oo exp(-2 pi k t) t^(s-1) dt = Gamma(s) / ((2 pi)^s k^s)."""
    if not k > 0:
        raise ValueError(f"need k > 0, got {k}")
    return math.gamma(s) / (TWO_PI * k) ** s


def _check(a: int, b: int, N: int) -> tuple[int, int]:
    if a % N == 0 or b % N == 0:
        raise ValueError(f"need a, b not divisible by N; got a={a}, b={b}, N={N}")
    return a % N, b % N


def lemma3_closed(a: int, b: int, N: int) -> complex:
    """i Cl2(2 pi a/N) B(b/N)."""
    a, b = _check(a, b, N)
    return 1j * clausen2(TWO_PI * a / N) * float(bernoulli_b2(Fraction(b, N)))


def lemma4_closed(a: int, b: int, N: int) -> complex:
    """-i Cl2(2 pi a/N) (1 + zeta^b)/(1 - zeta^b)."""
    a, b = _check(a, b, N)
    return -1j * clausen2(TWO_PI * a / N) * cyc_halfcot(b, N).embed()


def _window(N: int) -> tuple[float, float]:
    return -math.log(N * N) - 4.0, 3.0


def lemma3_numeric(a: int, b: int, N: int, tol: float = 1e-11) -> NumericResult:
    """Quadrature of int_0^oo (e_{a,b}(it) + e_{a,-b}(it) - h_a) t dt.

    For t >= 1/N the q-series is summed directly; below 1/N both series are
    replaced by their partners via e(it) = (i/t) e~(i/(N^2 t)).
    """
    a, b = _check(a, b, N)
    K = terms_for_tail(math.exp(-TWO_PI / N), tol * 1e-3, power=1)
    big = eisenstein_coeffs(a, b, N, K) + eisenstein_coeffs(a, -b, N, K)
    h_a = cyc_halfcot(a, N).embed()
    big[0] = 0.0  # the constants cancel against h_a exactly
    small = (eisenstein_tilde_coeffs(a, b, N, K) + eisenstein_tilde_coeffs(a, -b, N, K)).astype(float)
    ks = np.arange(K + 1)

    def G(s):
        t = np.exp(s)
        out = np.empty(t.shape, dtype=complex)
        hi = t >= 1.0 / N
        if hi.any():
            th = t[hi]
            out[hi] = np.exp(-TWO_PI * np.outer(th, ks)) @ big * th
        lo = ~hi
        if lo.any():
            tl = t[lo]
            u = 1.0 / (N * N * tl)
            out[lo] = 1j * (np.exp(-TWO_PI * np.outer(u, ks)) @ small) - h_a * tl
        return out * t

    res = exp_trapezoid(G, tol, *_window(N))
    res.work["terms"] = K
    return res


@lru_cache(maxsize=256)
def _s_series(a: int, b: int, N: int, K: int) -> np.ndarray:
    m, n, k = divisor_pairs(K)
    chi = ((n - b) % N == 0).astype(float) - ((n + b) % N == 0).astype(float)
    w = 2j * np.sin(TWO_PI * ((a * m) % N) / N) / m * chi
    out = np.zeros(K + 1, dtype=complex)
    np.add.at(out, k, w)
    out.setflags(write=False)
    return out


def lemma4_numeric(a: int, b: int, N: int, tol: float = 1e-11) -> NumericResult:
    """Quadrature of int_0^oo (1/(iNt)) d/dt[S_{a,b}(1/(N^2 t))] dt.

    Below t = 1/N the derivative is taken term-wise. Above it the slowly
    converging series is replaced via the duality
    S_{a,b}(1/(N^2 t)) + S_{b,a}(t) = const, so the derivative becomes
    -d/dt S_{b,a}(t), a series in exp(-2 pi k t).
    """
    a, b = _check(a, b, N)
    K = terms_for_tail(math.exp(-TWO_PI / N), tol * 1e-4, power=1)
    w_small = _s_series(a, b, N, K) * np.arange(K + 1)
    w_large = _s_series(b, a, N, K) * np.arange(K + 1)
    ks = np.arange(K + 1)

    def G(s):
        t = np.exp(s)
        out = np.empty(t.shape, dtype=complex)
        hi = t >= 1.0 / N
        if hi.any():
            th = t[hi]
            dS = TWO_PI * (np.exp(-TWO_PI * np.outer(th, ks)) @ w_large)
            out[hi] = dS / (1j * N * th)
        lo = ~hi
        if lo.any():
            tl = t[lo]
            u = 1.0 / (N * N * tl)
            dS = TWO_PI * (np.exp(-TWO_PI * np.outer(u, ks)) @ w_small) / (N * N * tl * tl)
            out[lo] = dS / (1j * N * tl)
        return out * t

    res = exp_trapezoid(G, tol, *_window(N))
    res.work["terms"] = K
    return res
