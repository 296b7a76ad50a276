import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle
from reglab.mahler import (
    LaurentPoly2,
    boyd_measure_clausen,
    mahler_1var,
    mahler_2var,
    mahler_3var_boyd,
    mahler_family,
    mahler_family_series,
)

FAMILY = {"1": 1, "2": 2, "5": 5, "16": 16, "100": 100, "3j": 3j, "2j": 2j, "1j": 1j, "sqrt2": math.sqrt(2)}


@pytest.mark.parametrize("key", sorted(FAMILY))
def test_family_against_oracle(key):
    res = mahler_family(FAMILY[key], tol=1e-12)
    assert res.converged
    assert abs(res.value - oracle(f"m_family_{key}")) < 1e-11


@pytest.mark.parametrize("k", [1, 2, 0.5, 3j, 1 + 1j])
def test_family_even_in_k(k):
    assert abs(mahler_family(k).value - mahler_family(-k).value) < 1e-12
    assert abs(mahler_family(k).value - mahler_family(np.conj(k)).value) < 1e-12


def test_large_k_asymptotics():
    diff = mahler_family(100, tol=1e-13).value - math.log(100)
    assert -1e-3 < diff < 0
    assert abs(mahler_family(100).value - mahler_family_series(100)) < 1e-13
    assert abs(mahler_family(5 + 2j).value - mahler_family_series(5 + 2j)) < 1e-11
    with pytest.raises(ValueError):
        mahler_family_series(3)


def test_one_variable_jensen():
    assert abs(mahler_1var({0: -2, 1: 1}) - math.log(2)) < 1e-15
    assert abs(mahler_1var({0: 3, 2: 1}) - math.log(3)) < 1e-15
    assert abs(mahler_1var({0: 1, 1: 1})) < 1e-15
    assert abs(mahler_1var({0: 6, 1: -5, 2: 1}) - math.log(6)) < 1e-14


@pytest.mark.parametrize("k", [1, 2, 1j, 2j, 3, 0.3 + 0.2j])
def test_two_variable_routine_matches_family(k):
    P = LaurentPoly2.family(k)
    res = mahler_2var(P)
    ref = mahler_family(k, tol=1e-12).value
    assert abs(res.value - ref) <= res.errbound + 1e-12
    assert res.errbound < 1e-8


def test_two_variable_simple_cases():
    assert abs(mahler_2var(LaurentPoly2.from_dict({(1, 0): 2})).value - math.log(2)) < 1e-14
    r = mahler_2var(LaurentPoly2.from_dict({(0, 1): 1, (0, 0): -2}))
    assert abs(r.value - math.log(2)) < 1e-12
    r = mahler_2var(LaurentPoly2.from_dict({(0, 0): 1, (1, 0): 1, (0, 1): 1}))
    # log of 1 + x + y is 3 sqrt 3 / (4 pi) L(chi_-3, 2)
    assert abs(r.value - 0.3230659472194505) < 1e-8


random_polys = st.dictionaries(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
    st.integers(-3, 3).filter(bool),
    min_size=2, max_size=5,
)


@settings(max_examples=15, deadline=None)
@given(random_polys)
def test_invariances(coeffs):
    P = LaurentPoly2.from_dict(coeffs)
    base = mahler_2var(P)
    for Q in (P.swap(), P.reciprocal_x()):
        other = mahler_2var(Q)
        assert abs(other.value - base.value) <= 2 * (other.errbound + base.errbound) + 1e-9
    scaled = mahler_2var(P.scale(-3))
    assert abs(scaled.value - base.value - math.log(3)) <= 2 * (scaled.errbound + base.errbound) + 1e-9


def test_polynomial_json_round_trip():
    P = LaurentPoly2.from_dict({(1, -2): 2 + 1j, (0, 0): -1, (-1, 1): 0.5})
    assert LaurentPoly2.from_json(P.to_json()) == P
    assert P.swap().swap() == P


def test_boyd_measure():
    res = mahler_3var_boyd(tol=1e-12)
    assert res.converged
    assert abs(res.value - oracle("m_boyd")) < 1e-12
    assert abs(res.details["fine"] - res.details["coarse"]) < 1e-8


def test_boyd_measure_routes_agree():
    a = mahler_3var_boyd()
    b = mahler_3var_boyd(swap=True)
    c = boyd_measure_clausen()
    assert abs(a.value - b.value) < 1e-12
    assert abs(a.value - c.value) < 1e-12
