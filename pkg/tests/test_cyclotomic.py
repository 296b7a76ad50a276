import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reglab.cyclotomic import (
    CycElt,
    cyc_embed,
    cyc_halfcot,
    cyclotomic_polynomial,
    euler_phi,
    power_table,
)


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def test_small_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert len(cyclotomic_polynomial(15)) == 9


@pytest.mark.parametrize("n", range(1, 61))
def test_product_over_divisors_is_xn_minus_1(n):
    prod = [1]
    for d in range(1, n + 1):
        if n % d == 0:
            prod = poly_mul(prod, list(cyclotomic_polynomial(d)))
    assert prod == [-1] + [0] * (n - 1) + [1]
    assert len(cyclotomic_polynomial(n)) - 1 == euler_phi(n)


def test_root_of_unity_identities():
    z6 = CycElt.zeta(6)
    assert z6 * z6**5 == CycElt.rational(6, 1)
    z5 = CycElt.zeta(5)
    assert z5 + z5**2 + z5**3 + z5**4 == CycElt.rational(5, -1)
    one_minus = 1 - CycElt.zeta(7)
    assert one_minus * one_minus.inverse() == CycElt.rational(7, 1)


def test_power_table_rows_are_reduced_powers():
    T = power_table(12)
    assert T.shape == (12, euler_phi(12))
    for j in range(12):
        assert CycElt(12, [Fraction(int(x)) for x in T[j]]) == CycElt.zeta(12, j)


def test_embedding_basics():
    assert CycElt.rational(9, 1).embed() == 1 + 0j
    assert abs(CycElt.zeta(4).embed() - 1j) < 1e-15
    assert abs(cyc_embed(CycElt.zeta(15, 4)) - cmath.exp(2j * math.pi * 4 / 15)) < 1e-15


def test_halfcot():
    assert cyc_halfcot(6, 12).is_zero()
    h = cyc_halfcot(1, 15)
    assert abs(h.embed() - 1j / math.tan(math.pi / 15)) < 1e-13
    with pytest.raises(ValueError):
        cyc_halfcot(15, 15)


@pytest.mark.parametrize("N", [5, 8, 12, 15, 24])
def test_halfcot_is_odd(N):
    for a in range(1, N):
        assert (cyc_halfcot(a, N) + cyc_halfcot(N - a, N)).is_zero()


def elements(N):
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7)
    return st.lists(coeff, min_size=1, max_size=N).map(lambda cs: CycElt(N, cs))


levels = st.sampled_from([3, 5, 7, 8, 12, 15])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_ring_axioms(data):
    N = data.draw(levels)
    x, y, z = (data.draw(elements(N)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x + (-x) == CycElt.rational(N, 0)
    assert len(x.coeffs) == euler_phi(N)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_embedding_is_a_homomorphism(data):
    N = data.draw(levels)
    x, y = data.draw(elements(N)), data.draw(elements(N))
    scale = (1 + abs(x.embed())) * (1 + abs(y.embed()))
    assert abs((x * y).embed() - x.embed() * y.embed()) < 1e-12 * scale
    assert abs((x + y).embed() - x.embed() - y.embed()) < 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_inverse(data):
    N = data.draw(levels)
    x = data.draw(elements(N))
    if x.is_zero():
        with pytest.raises(ZeroDivisionError):
            x.inverse()
    else:
        assert x * x.inverse() == CycElt.rational(N, 1)
        assert x ** -2 * x**2 == CycElt.rational(N, 1)


def test_lift_preserves_embedding():
    x = CycElt.zeta(4) + Fraction(1, 3)
    y = x.lift(8)
    assert y.level == 8
    assert abs(y.embed() - x.embed()) < 1e-15
