import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import oracle
from reglab.siegel import bernoulli_b2
from reglab.special import (
    clausen2,
    digamma,
    lemma3_closed,
    lemma3_numeric,
    lemma4_closed,
    lemma4_numeric,
    mellin_kernel,
)


@pytest.mark.parametrize("x", [0.3, 1.0, 2.0, 3.0, 5.5])
def test_clausen_against_oracle(x):
    assert abs(clausen2(x) - oracle(f"clausen2_{x}")) < 1e-14


def test_clausen_zeros_and_oddness():
    assert clausen2(0.0) == 0.0
    assert abs(clausen2(math.pi)) < 1e-15
    for x in (0.1, 1.3, 2.9):
        assert abs(clausen2(-x) + clausen2(x)) < 1e-15
        assert abs(clausen2(x + 2 * math.pi) - clausen2(x)) < 1e-14


def test_clausen_at_half_pi_by_direct_series():
    # sum over odd m of (-1)^((m-1)/2)/m^2; averaging consecutive partial sums of
    # an alternating series removes the leading error
    m = np.arange(1, 2_000_001, 2, dtype=float)
    terms = np.where((m // 2) % 2 == 0, 1.0, -1.0) / m**2
    partial = np.cumsum(terms)
    estimate = 0.5 * (partial[-1] + partial[-2])
    assert abs(clausen2(math.pi / 2) - estimate) < 1e-13


def test_mellin_kernel():
    for s in (2, 3):
        for k in (1.0, 2.5):
            val, _ = quad(lambda t: math.exp(-2 * math.pi * k * t) * t ** (s - 1), 0, math.inf)
            assert abs(mellin_kernel(s, k) - val) < 1e-12
    with pytest.raises(ValueError):
        mellin_kernel(2, 0.0)


@pytest.mark.parametrize("x", [0.1, 1.0, 2.5, 7.0])
def test_digamma_against_oracle(x):
    assert abs(digamma(x) - oracle(f"digamma_{x}")) < 1e-13


def test_digamma_reflection():
    for x in (0.2, 0.37, 0.5, 0.81):
        assert abs(digamma(1 - x) - digamma(x) - math.pi / math.tan(math.pi * x)) < 1e-12


def test_cosine_series_is_bernoulli():
    x = Fraction(3, 15)
    n = np.arange(1, 100_001, dtype=float)
    s = np.sum(np.cos(2 * math.pi * float(x) * n) / n**2)
    assert abs(s - math.pi**2 * float(bernoulli_b2(x))) < 1e-5


@pytest.mark.parametrize("a,b,N", [(7, 4, 15), (1, 2, 5), (3, 1, 7)])
def test_clausen_bernoulli_integral(a, b, N):
    res = lemma3_numeric(a, b, N)
    assert abs(res.value - lemma3_closed(a, b, N)) < 1e-9
    assert res.errbound < 1e-9


@pytest.mark.parametrize("a,b,N", [(7, 4, 15), (1, 2, 5), (5, 7, 12)])
def test_clausen_cotangent_integral(a, b, N):
    res = lemma4_numeric(a, b, N)
    assert abs(res.value - lemma4_closed(a, b, N)) < 1e-9


def test_closed_forms_vanish_and_flip():
    # Cl2(2 pi a/N) vanishes when 2a = N
    assert lemma3_closed(6, 1, 12) == 0
    assert abs(lemma4_closed(5, 2, 10)) < 1e-15
    assert abs(lemma3_closed(-7, 4, 15) + lemma3_closed(7, 4, 15)) < 1e-15
    assert abs(lemma4_closed(7, -4, 15) + lemma4_closed(7, 4, 15)) < 1e-14
    with pytest.raises(ValueError):
        lemma3_closed(15, 4, 15)
