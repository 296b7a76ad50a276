"""L-values at s = 2, 3 of weight-2 q-expansions.

For f = sum a_n q^n, L(f, s) = (2 pi)^s / Gamma(s) int_0^oo f(it) t^(s-1) dt.
Combinations of Eisenstein products are integrated in closed form term by
term: the range t >= 1/N uses the q-series of f (constant removed), the range
t < 1/N uses the partner series g~ obtained from the inversion
tau -> -1/(N^2 tau). Plain cusp-form candidates are integrated down to a
small cutoff eps, and the neglected piece is estimated and reported.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import exp1, gammaincc

from .cyclotomic import CycElt
from .eisenstein import WeightTwoCombo, combo_coeffs
from .qseries import QExp, qexp_eval
from .quadrature import BudgetExceeded, NumericResult, majorant_tail, terms_for_tail

__all__ = [
    "lvalue_combo",
    "lvalue_qexp",
    "lvalue_partial_sum",
    "default_cutoff",
]

TWO_PI = 2 * math.pi
EULER_GAMMA = 0.5772156649015329


def lvalue_combo(combo: WeightTwoCombo, tol: float = 1e-12) -> NumericResult:
    """L(f - f(i oo), 2) for a weight-2 combination f.

    With J(k) = int_{1/N}^oo t e^(-2 pi k t) dt and E1 the exponential integral,

        L = 4 pi^2 [ sum_k f_k J(k) - sum_k g~_k E1(2 pi k/N) - f(i oo)/(2 N^2) ].
    """
    N = combo.level
    if combo.is_zero():
        return NumericResult(0.0, 0.0, {"terms": 0})
    lam = sum(abs(lam.embed() if isinstance(lam, CycElt) else complex(lam)) for *_, lam in combo.terms)
    r = math.exp(-TWO_PI / N)
    # |f_k|, |g~_k| <= 8 lam (k^3 + k) (products of two series with |coeff_k| <= 2 d(k) <= 2k)
    inner = tol / (4 * math.pi**2 * 8 * lam * 2)
    K = terms_for_tail(r, inner, power=3)
    f, g = combo_coeffs(combo, K)
    k = np.arange(1, K + 1)
    x = TWO_PI * k
    J = np.exp(-x / N) * (1 / (x * N) + 1 / x**2)
    E = exp1(x / N)
    f0 = combo.constant_value
    terms = np.concatenate([f[1:] * J, -g[1:] * E, [-f0 / (2 * N * N)]])
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    value = 4 * math.pi**2 * total
    tail = 4 * math.pi**2 * 8 * lam * 2 * majorant_tail(r, K, 3)
    rounding = 4 * math.pi**2 * 1e-15 * float(np.sum(np.abs(terms)))
    res = NumericResult(value, tail + rounding, {"terms": K})
    res.details = {"tail": tail, "rounding": rounding}
    return res


def default_cutoff(N: int, tol: float) -> float:
    """Lower cutoff eps for lvalue_qexp: the neglected piece scales like exp(-2 pi/(N eps))."""
    return min(0.01, TWO_PI / (N * (math.log(1 / tol) + 2)))


def _envelope(f: QExp, first: int) -> float:
    """A with |a_n| <= A n over the known coefficients."""
    vals = np.abs(f.complex_coeffs())
    n = first + np.arange(vals.size)
    return max(1e-300, float(np.max(vals / n))) if vals.size else 0.0


def lvalue_qexp(f: QExp, s: int = 2, tol: float = 1e-10, eps: float | None = None) -> NumericResult:
    """L(f, s) for a cusp-form candidate f = sum_{n>=1} a_n q^n.

    Integrates f(it) t^(s-1) over [eps, oo) exactly term by term,
    L_eps = sum a_n Q(s, 2 pi n eps) / n^s (Q the regularized upper incomplete
    gamma function). The remainder from [0, eps) is not computed (no
    functional equation is assumed); its heuristic estimate
    (2 pi)^s/Gamma(s) |f(i eps)| eps^s / s is reported in ``details`` and
    included in errbound.
    """
    if s not in (2, 3):
        raise ValueError(f"s must be 2 or 3, got {s}")
    N = f.level
    D = f.expdenom
    if f.order == 0:
        return NumericResult(0.0, 0.0, {"terms": 0})
    if f.lead % D or f.lead < D:
        raise ValueError("need integral exponents starting at q^1 or later (a cusp-form candidate)")
    first = f.lead // D
    eps = default_cutoff(N, tol) if eps is None else float(eps)
    A = _envelope(f, first)
    # smallest K with A * sum_{n>K} Q(s, 2 pi n eps) n^(1-s) < tol / 10
    rho = math.exp(-TWO_PI * eps)
    n = first
    while True:
        term = A * float(gammaincc(s, TWO_PI * n * eps)) * n ** (1 - s)
        if term / (1 - rho) < tol / 10 and TWO_PI * n * eps > s:
            break
        n += max(1, n // 50)
        if n > 10**7:
            raise BudgetExceeded("coefficient budget exceeded")
    K = n
    count = K - first + 1
    if count > f.order and not f.polynomial:
        raise BudgetExceeded(f"coefficient budget exceeded: need {count} coefficients, "
                             f"have {f.order} (eps = {eps:g})")
    a = f.exponent_coeffs(count)
    ns = first + np.arange(count)
    w = gammaincc(s, TWO_PI * ns * eps) / ns.astype(float) ** s
    terms = a * w
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    tail = A * float(gammaincc(s, TWO_PI * K * eps)) * K ** (1 - s) / (1 - rho)
    # the integrand at the cutoff, summed directly (cancellation limits it to rounding level)
    at_eps, _ = qexp_eval(f.truncate(count) if not f.polynomial else f, 0, N, eps)
    rounding_eps = 1e-16 * float(np.sum(np.abs(a) * np.exp(-TWO_PI * ns * eps)))
    f_eps = max(abs(at_eps), rounding_eps)
    remainder = TWO_PI**s / math.gamma(s) * f_eps * eps**s / s
    rounding = 1e-15 * float(np.sum(np.abs(terms)))
    if np.all(np.isreal(a)):
        value = value.real
    res = NumericResult(value, tail + remainder + rounding, {"terms": count})
    res.details = {"eps": eps, "tail": tail, "small_t_remainder": remainder, "rounding": rounding}
    return res


def lvalue_partial_sum(f: QExp, s: int, M: int) -> tuple[float, float]:
    """sum_{n<=M} a_n / n^s and a heuristic tail envelope.

    The envelope assumes |a_n| <= |a_1| d(n) sqrt(n) and uses the average order of
    the divisor function: with sigma = s - 1/2 it is
    |a_1| M^(1-sigma) [(log M + 2 gamma)/(sigma - 1) + 1/(sigma - 1)^2].
    """
    D = f.expdenom
    if f.order == 0:
        return 0.0, 0.0
    if f.lead % D or f.lead < D:
        raise ValueError("need integral exponents starting at q^1 or later")
    first = f.lead // D
    count = M - first + 1
    if count > f.order and not f.polynomial:
        raise ValueError(f"need {count} coefficients, have {f.order}")
    count = max(0, count)
    a = f.exponent_coeffs(count)
    ns = (first + np.arange(count)).astype(float)
    terms = a / ns**s
    partial = complex(math.fsum(terms.real), math.fsum(terms.imag))
    partial = partial.real if abs(partial.imag) == 0 else partial
    sigma = s - 0.5
    scale = abs(a[0]) if count and first == 1 else max(1.0, float(np.max(np.abs(a))) if count else 1.0)
    if f.polynomial and count >= f.order:
        return partial, 0.0
    tail = scale * M ** (1 - sigma) * ((math.log(M) + 2 * EULER_GAMMA) / (sigma - 1) + 1 / (sigma - 1) ** 2)
    return partial, float(tail)
