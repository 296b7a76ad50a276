import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reglab.cyclotomic import CycElt
from reglab.qseries import (
    QExp,
    euler_product,
    qexp_dlog,
    qexp_eta,
    qexp_eta_quotient,
    qexp_eval,
    qexp_qdq,
)
from reglab.siegel import UnitProduct, siegel_qexp


def test_geometric_series_inverse():
    one_minus_q = QExp.from_coeffs(1, 0, [1, -1], polynomial=True)
    inv = one_minus_q.inverse(50)
    assert inv.coeffs == [Fraction(1)] * 50
    assert (one_minus_q * inv).coeffs == [Fraction(1)] + [Fraction(0)] * 49


def test_multiplication_commutes_and_leads_add():
    f = siegel_qexp(7, 15, 60)
    g = siegel_qexp(2, 15, 60)
    assert f * g == g * f
    assert (f * g).lead == f.lead + g.lead


def test_siegel_ratio_leading_coefficient():
    h = siegel_qexp(7, 15, 80) / siegel_qexp(2, 15, 80)
    assert h.lead_exponent == Fraction(-1)
    assert h.coeff(0) == 1


def test_qdq_of_constant_and_inverse_q():
    assert qexp_qdq(QExp.monomial(5, 0, 3)).is_zero()
    f = qexp_qdq(QExp.monomial(5, -120, 2))
    assert f.lead_exponent == -1 and f.coeff(0) == -2


def random_series(seed, N=4, M=30, lead=0):
    rng = np.random.default_rng(seed)
    return QExp.from_coeffs(N, lead, [int(x) for x in rng.integers(-4, 5, M)])


@pytest.mark.parametrize("seed", range(5))
def test_qdq_leibniz_rule(seed):
    f = random_series(seed, lead=24 * 4 * 2)
    g = random_series(seed + 100, lead=-24 * 4)
    assert qexp_qdq(f * g) == qexp_qdq(f) * g + f * qexp_qdq(g)


def test_dlog_is_additive():
    f, g = siegel_qexp(7, 15, 80), siegel_qexp(4, 15, 80)
    assert qexp_dlog(f * g) == qexp_dlog(f) + qexp_dlog(g)


def test_dlog_constant_is_lead_exponent():
    h = siegel_qexp(7, 15, 80) / siegel_qexp(2, 15, 80)
    d = qexp_dlog(h)
    assert d.lead == 0 and d.coeff(0) == -1


def test_pentagonal_coefficients():
    assert list(euler_product(8)) == [1, -1, -1, 0, 0, 1, 0, 1]
    assert list(euler_product(7, 2)) == [1, 0, -1, 0, -1, 0, 0]


def test_eta_leads():
    assert qexp_eta(1, 15).lead_exponent == Fraction(1, 24)
    assert qexp_eta(5, 15).lead_exponent == Fraction(5, 24)
    f15 = qexp_eta_quotient({1: 1, 3: 1, 5: 1, 15: 1}, 15, 50)
    assert f15.lead_exponent == 1 and f15.coeff(0) == 1
    assert [int(f15.coeff(k)) for k in range(8)] == [1, -1, -1, -1, 1, 1, 0, 3]
    with pytest.raises(ValueError):
        qexp_eta(4, 15)


def test_sparse_and_exact_eta_paths_agree():
    fast = qexp_eta_quotient({1: 1, 3: 1, 5: 1, 15: 1}, 15, 300)
    slow = qexp_eta(1, 15, 300) * qexp_eta(3, 15, 300) * qexp_eta(5, 15, 300) * qexp_eta(15, 15, 300)
    assert fast == slow


def test_eval_matches_direct_product():
    f = QExp.from_coeffs(1, 0, list(euler_product(200)))
    q = math.exp(-2 * math.pi)
    direct = math.prod(1 - q**n for n in range(1, 200))
    value, tail = qexp_eval(f, 0, 1, 1.0)
    assert abs(value - direct) < 1e-15
    assert tail < 1e-300


def test_eval_periodic_in_cusp():
    f = siegel_qexp(7, 15, 100) / siegel_qexp(2, 15, 100)
    v1, _ = qexp_eval(f, 3, 15, 0.4)
    v2, _ = qexp_eval(f, 18, 15, 0.4)
    assert v1 == v2


def test_json_round_trip():
    for f in (siegel_qexp(7, 15, 30), QExp.from_coeffs(8, 3, [CycElt.zeta(8), 1]),
              QExp.from_coeffs(3, 0, [1.5 + 2j, -1j]), QExp.monomial(6, 12, Fraction(2, 3))):
        assert QExp.from_json(f.to_json()) == f


# property tests --------------------------------------------------------

coeff_lists = st.lists(st.integers(-6, 6), min_size=1, max_size=25)


def full_convolution(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, st.integers(-3, 3), st.integers(-3, 3))
def test_truncated_product_is_sound(a, b, la, lb):
    a[0] = a[0] or 1
    b[0] = b[0] or 1
    N = 2
    D = 48
    f = QExp.from_coeffs(N, la * D + 5, a)
    g = QExp.from_coeffs(N, lb * D + 7, b)
    h = f * g
    ref = full_convolution(a, b)
    assert h.lead == f.lead + g.lead
    # nothing is claimed beyond the shorter operand
    assert h.order <= min(len(a), len(b))
    assert h.precision <= min(f.precision + g.lead, g.precision + f.lead)
    assert [int(x) for x in h.coeffs] == ref[: h.order]


@settings(max_examples=40, deadline=None)
@given(coeff_lists, st.integers(-2, 2))
def test_sum_precision_is_minimum(a, shift):
    a[0] = a[0] or 1
    f = QExp.from_coeffs(3, 0, a)
    g = QExp.from_coeffs(3, 72 * shift, a[:-1] or [1])
    s = f + g
    assert s.precision <= min(f.precision, g.precision)


def exp_series(d, M):
    """Formal exponential solving n a_n = sum_k d_k a_(n-k), a_0 = 1."""
    a = [Fraction(1)] + [Fraction(0)] * (M - 1)
    for n in range(1, M):
        a[n] = sum(d[k] * a[n - k] for k in range(1, n + 1)) / n
    return a


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=20))
def test_dlog_round_trip(d):
    d = [0] + d
    M = len(d)
    f = QExp.from_coeffs(1, 0, exp_series(d, M))
    assert qexp_dlog(f) == QExp.from_coeffs(1, 0, d)


def test_first_example_x_dlog():
    x = UnitProduct.parse(15, "7:1,2:-1").qexp(200)
    assert qexp_dlog(x) == qexp_dlog(siegel_qexp(7, 15, 200)) - qexp_dlog(siegel_qexp(2, 15, 200))


def test_constant_series_eval():
    value, tail = qexp_eval(QExp.monomial(7, 0, Fraction(5, 2)), 3, 7, 0.2)
    assert value == 2.5 and tail == 0.0


@settings(max_examples=40, deadline=None)
@given(coeff_lists, coeff_lists, st.integers(-3, 3), st.integers(-3, 3))
def test_quotient_lead_bookkeeping(a, b, la, lb):
    a[0] = a[0] or 1
    b[0] = b[0] or 1
    f = QExp.from_coeffs(2, 48 * la + 5, a)
    g = QExp.from_coeffs(2, 48 * lb + 7, b)
    assert (f / g).lead == f.lead - g.lead
