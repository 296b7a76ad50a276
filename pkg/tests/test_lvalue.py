import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import ORACLE, oracle
from reglab.eisenstein import combo_coeffs, weight2_combo
from reglab.examples import eta_sum_qexp
from reglab.qseries import QExp, qexp_eta_quotient
from reglab.lvalue import default_cutoff, lvalue_combo, lvalue_partial_sum, lvalue_qexp

F15 = {1: 1, 3: 1, 5: 1, 15: 1}


def direct_quadrature(combo, K=400):
    """4 pi^2 int_0^oo (f(it) - f(i oo)) t dt with both halves integrated numerically."""
    N = combo.level
    f, g = combo_coeffs(combo, K)
    k = np.arange(K + 1)
    f0 = combo.constant_value

    def upper(t):
        return ((f[1:] * np.exp(-2 * math.pi * k[1:] * t)).sum() * t).real

    def lower(u):
        return ((g[1:] * np.exp(-2 * math.pi * k[1:] * u)).sum() / u).real

    a, _ = quad(upper, 1 / N, math.inf, epsabs=1e-13, limit=200)
    b, _ = quad(lower, 1 / N, math.inf, epsabs=1e-13, limit=200)
    return 4 * math.pi**2 * (a - b - f0.real / (2 * N * N))


def test_zero_combination():
    assert lvalue_combo(weight2_combo([], 15, 0)).value == 0.0


@pytest.mark.parametrize("a,b,c,N", [(7, 4, 3, 15), (1, 2, 1, 5), (2, 3, 1, 7), (5, 1, 7, 12)])
def test_closed_form_matches_direct_quadrature(a, b, c, N):
    combo = weight2_combo([(a, b, c, 1)], N, 0)
    res = lvalue_combo(combo)
    assert abs(res.value.imag) < 1e-12
    assert abs(res.value.real - direct_quadrature(combo)) < 1e-9


def test_swap_antisymmetry():
    x = lvalue_combo(weight2_combo([(7, 4, 3, 1)], 15, 0)).value
    y = lvalue_combo(weight2_combo([(4, 7, 3, 1)], 15, 0)).value
    assert abs(x + y) < 1e-12


def test_linearity():
    t1, t2 = (7, 4, 3), (2, 1, 3)
    a = lvalue_combo(weight2_combo([t1 + (1,)], 15, 0)).value
    b = lvalue_combo(weight2_combo([t2 + (1,)], 15, 0)).value
    ab = lvalue_combo(weight2_combo([t1 + (2,), t2 + (-3,)], 15, 0)).value
    assert abs(ab - (2 * a - 3 * b)) < 1e-11


def test_first_example_combination():
    terms = [(7, 4, -3, 2), (7, 1, -3, -2), (2, 4, -3, -2), (2, 1, -3, 2)]
    val = lvalue_combo(weight2_combo(terms, 15, 0)).value
    assert abs(val - 30 * oracle("L_f15_2")) < 1e-10


def test_small_t_piece_against_brute_force():
    # int_0^eps f(it) t dt for the newform, summing the q-series directly at tiny t
    f = qexp_eta_quotient(F15, 15, 20000)
    res = lvalue_qexp(f, 2, tol=1e-10)
    eps = res.details["eps"]
    coeffs = f.complex_coeffs().real
    n = np.arange(1, coeffs.size + 1)

    def integrand(t):
        return float(np.sum(coeffs * np.exp(-2 * math.pi * n * t))) * t

    piece, _ = quad(integrand, eps / 3, eps, epsabs=1e-14, limit=200)
    assert res.details["small_t_remainder"] >= abs(4 * math.pi**2 * piece) - 1e-7


def test_newform_values_against_oracle():
    f = qexp_eta_quotient(F15, 15, 4000)
    res = lvalue_qexp(f, 2, tol=1e-10)
    assert abs(res.value - oracle("L_f15_2")) < max(res.errbound, 1e-9) + 1e-10
    res3 = lvalue_qexp(f, 3, tol=1e-10)
    assert abs(res3.value - oracle("L_f15_3")) < max(res3.errbound, 1e-9) + 1e-10


def test_split_points_in_oracle_agree():
    for name in ("f15", "f17", "f24", "f40", "f56"):
        assert abs(oracle(f"L_{name}_2") - oracle(f"L_{name}_2_split2")) < 1e-20


@pytest.mark.parametrize("name", ["f24", "f40"])
def test_other_eta_newforms(name):
    if name == "f24":
        f = qexp_eta_quotient({2: 1, 4: 1, 6: 1, 12: 1}, 24, 8000)
    else:
        f = eta_sum_qexp([(1, {1: 1, 8: 1, 10: 2, 20: 2, 5: -1, 40: -1}),
                          (1, {2: 2, 4: 2, 5: 1, 40: 1, 1: -1, 8: -1})], 40, 600)
        assert [int(x.real) for x in f.complex_coeffs()[:59]] == oracle_list("coeffs_f40")
    res = lvalue_qexp(f, 2, tol=1e-8)
    assert abs(res.value - oracle(f"L_{name}_2")) < res.errbound + 1e-8


def oracle_list(key):
    return [int(x) for x in ORACLE[key]]


def test_partial_sums_of_cube_value():
    f = qexp_eta_quotient(F15, 15, 100_000)
    partial, tail = lvalue_partial_sum(f, 3, 100_000)
    assert abs(partial - oracle("L_f15_3")) <= tail
    p4, t4 = lvalue_partial_sum(f, 3, 10_000)
    assert abs(p4 - partial) <= t4 + tail
    assert tail < 1e-6


def test_partial_sums_bracket_square_value():
    f = qexp_eta_quotient(F15, 15, 20_000)
    partial, tail = lvalue_partial_sum(f, 2, 20_000)
    assert abs(partial - oracle("L_f15_2")) <= tail


def test_single_term_series():
    q = QExp.monomial(15, 360, 1)
    assert lvalue_partial_sum(q, 2, 100) == (1.0, 0.0)
    assert lvalue_partial_sum(q, 3, 5)[0] == 1.0


def test_rejects_non_cusp_forms():
    with pytest.raises(ValueError):
        lvalue_qexp(QExp.from_coeffs(15, 0, [1, 2, 3]), 2)
    with pytest.raises(ValueError):
        lvalue_qexp(qexp_eta_quotient(F15, 15, 100), 4)


def test_cutoff_shrinks_with_tolerance():
    assert default_cutoff(40, 1e-12) < default_cutoff(40, 1e-6) <= 0.01


def test_partner_series_gives_small_t_values():
    # f(i t) = -N^4 u^2 g~(i u) with u = 1/(N^2 t), checked against the q-series of f at small t
    N = 15
    combo = weight2_combo([(7, 4, 3, 1)], N, 0)
    f, g = combo_coeffs(combo, 6000)
    k = np.arange(f.size)
    for t in (0.05, 0.03, 0.02):
        u = 1 / (N * N * t)
        direct = np.sum(f * np.exp(-2 * math.pi * k * t))
        partner = -(N**4) * u * u * np.sum(g * np.exp(-2 * math.pi * k * u))
        assert abs(direct - partner) < 1e-9 * max(1.0, abs(direct))
