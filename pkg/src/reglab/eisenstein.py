"""Weight-1 Eisenstein series e_{a,b}, their partners e~_{a,b}, and weight-2 combinations.

    e_{a,b}  = (h_a + h_b)/2 + sum_{m,n>=1} (zeta^(am+bn) - zeta^-(am+bn)) q^(mn),
    e~_{a,b} = sum_{m=a, n=b} q^(mn) - sum_{m=-a, n=-b} q^(mn)       (congruences mod N),

where h_x = (1 + zeta^x)/(1 - zeta^x). They are related by
e_{a,b}(-1/(N^2 tau)) = N^2 tau e~_{a,b}(tau). The weight-2 combination
f_{a,b;c} = e_{a,bc} e_{b,-ac} - e_{a,-bc} e_{b,ac} has constant term
(h_b h_{bc} - h_a h_{ac})/2.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclotomic import CycElt, cyc_halfcot, power_table
from .qseries import DEFAULT_ORDER, QExp, divisor_pairs
from .quadrature import BudgetExceeded, terms_for_tail

__all__ = [
    "EisSeries",
    "WeightTwoCombo",
    "eisenstein_qexp",
    "eisenstein_tilde_qexp",
    "eisenstein_coeffs",
    "eisenstein_tilde_coeffs",
    "eisenstein_eval",
    "eisenstein_tilde_eval",
    "lemma2_residual",
    "weight2_combo",
    "combo_coeffs",
    "combo_constant",
    "parse_combo",
]


def _nonzero(x: int, N: int, name: str) -> int:
    r = x % N
    if r == 0:
        raise ValueError(f"{name} = {x} is divisible by N = {N}")
    return r


@dataclass(frozen=True)
class EisSeries:
    """e_{a,b} at level N: exact constant term and exact q-expansion (constant included)."""

    level: int
    a: int
    b: int
    constant: CycElt
    qexp: QExp


def _constant_row(x: CycElt) -> tuple[list[Fraction], int]:
    den = 1
    for c in x.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(c * den) for c in x.coeffs], den


@lru_cache(maxsize=256)
def _eis_counts(a: int, b: int, N: int, M: int) -> np.ndarray:
    """Group-ring coefficients: row k counts zeta^j in the q^k coefficient."""
    counts = np.zeros((M, N), dtype=np.int64)
    if M > 1:
        m, n, k = divisor_pairs(M - 1)
        j = (a * m + b * n) % N
        np.add.at(counts, (k, j), 1)
        np.add.at(counts, (k, (-j) % N), -1)
    counts.setflags(write=False)
    return counts


def eisenstein_qexp(a: int, b: int, N: int, M: int = DEFAULT_ORDER) -> EisSeries:
    """Exact q-expansion of e_{a,b} in Q(zeta_N) with M stored coefficients."""
    a = _nonzero(a, N, "a")
    b = _nonzero(b, N, "b")
    const = (cyc_halfcot(a, N) + cyc_halfcot(b, N)) / 2
    row, den = _constant_row(const)
    num = (_eis_counts(a, b, N, M) @ power_table(N)).astype(object) * den
    num[0] = row
    return EisSeries(N, a, b, const, QExp._exact(N, 0, N, num, den))


def eisenstein_coeffs(a: int, b: int, N: int, K: int) -> np.ndarray:
    """Complex coefficients of e_{a,b} for q^0 .. q^K."""
    a = _nonzero(a, N, "a")
    b = _nonzero(b, N, "b")
    out = np.zeros(K + 1, dtype=complex)
    m, n, k = divisor_pairs(K)
    w = 2j * np.sin(2 * np.pi * ((a * m + b * n) % N) / N)
    np.add.at(out, k, w)
    out[0] = 0.5 * (cyc_halfcot(a, N).embed() + cyc_halfcot(b, N).embed())
    return out


def eisenstein_tilde_coeffs(a: int, b: int, N: int, K: int) -> np.ndarray:
    """Integer coefficients of e~_{a,b} for q^0 .. q^K (the constant is zero)."""
    a = _nonzero(a, N, "a")
    b = _nonzero(b, N, "b")
    m, n, k = divisor_pairs(K)
    w = (((m - a) % N == 0) & ((n - b) % N == 0)).astype(np.int64) \
        - (((m + a) % N == 0) & ((n + b) % N == 0)).astype(np.int64)
    out = np.zeros(K + 1, dtype=np.int64)
    np.add.at(out, k, w)
    return out


def eisenstein_tilde_qexp(a: int, b: int, N: int, M: int = DEFAULT_ORDER) -> QExp:
    """e~_{a,b} as an integer series known below q^M."""
    coeffs = eisenstein_tilde_coeffs(a, b, N, M - 1)
    return QExp._exact(N, 0, 1, coeffs.astype(object).reshape(M, 1), 1)


def _series_eval(coeffs: np.ndarray, tau: complex) -> complex:
    k = np.arange(coeffs.shape[0])
    terms = coeffs * np.exp(2j * np.pi * tau * k)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _terms(tau: complex, tol: float) -> int:
    if tau.imag <= 0:
        raise ValueError(f"need Im(tau) > 0, got {tau}")
    # |coefficient_k| <= 2 d(k) <= 2 k, covered by the power-1 majorant
    return terms_for_tail(math.exp(-2 * math.pi * tau.imag), tol, power=1)


def eisenstein_eval(a: int, b: int, N: int, tau: complex, tol: float = 1e-13) -> complex:
    """e_{a,b}(tau) by direct summation of the q-series."""
    tau = complex(tau)
    return _series_eval(eisenstein_coeffs(a, b, N, _terms(tau, tol)), tau)


def eisenstein_tilde_eval(a: int, b: int, N: int, tau: complex, tol: float = 1e-13) -> complex:
    """e~_{a,b}(tau) by direct summation of the q-series."""
    tau = complex(tau)
    return _series_eval(eisenstein_tilde_coeffs(a, b, N, _terms(tau, tol)).astype(complex), tau)


def lemma2_residual(a: int, b: int, N: int, tau: complex, tol: float = 1e-13) -> float:
    """|e_{a,b}(-1/(N^2 tau)) / (N^2 tau) - e~_{a,b}(tau)|, both sides summed numerically."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError(f"need Im(tau) > 0, got {tau}")
    w = -1 / (N * N * tau)
    try:
        lhs = eisenstein_eval(a, b, N, w, tol) / (N * N * tau)
        rhs = eisenstein_tilde_eval(a, b, N, tau, tol)
    except BudgetExceeded:
        raise
    return abs(lhs - rhs)


# -- weight-2 combinations -------------------------------------------------

def _admissible(a: int, b: int, c: int, N: int) -> tuple[int, int, int]:
    a = _nonzero(a, N, "a")
    b = _nonzero(b, N, "b")
    if (a * c) % N == 0 or (b * c) % N == 0:
        raise ValueError(f"term (a,b,c) = ({a},{b},{c}) is not admissible at level {N}: "
                         f"ac and bc must be nonzero mod N")
    return a, b, c % N


def _as_coefficient(lam):
    if isinstance(lam, (int, Fraction, CycElt)):
        return lam
    if isinstance(lam, float) and lam.is_integer():
        return Fraction(int(lam))
    if isinstance(lam, complex) and lam.imag == 0 and lam.real.is_integer():
        return Fraction(int(lam.real))
    return complex(lam)


def combo_constant(a: int, b: int, c: int, N: int) -> CycElt:
    """Exact constant term (h_b h_{bc} - h_a h_{ac})/2 of f_{a,b;c}."""
    a, b, c = _admissible(a, b, c, N)
    h = lambda x: cyc_halfcot(x % N, N)  # noqa: E731
    return (h(b) * h(b * c) - h(a) * h(a * c)) / 2


@dataclass(frozen=True)
class WeightTwoCombo:
    """sum lambda * f_{a,b;c} at level N.

    ``terms`` holds reduced (a, b, c, lambda); ``constant`` is exact (a CycElt)
    when every lambda is rational, otherwise a complex number.
    """

    level: int
    terms: tuple
    qexp: QExp | None
    constant: object

    @property
    def constant_value(self) -> complex:
        c = self.constant
        return c.embed() if isinstance(c, CycElt) else complex(c)

    def is_zero(self) -> bool:
        return len(self.terms) == 0


def weight2_combo(terms, N: int, M: int = DEFAULT_ORDER) -> WeightTwoCombo:
    """Exact (or complex, for non-rational lambda) q-expansion of sum lambda f_{a,b;c}.

    Terms sharing (a, b, c) are merged and zero coefficients dropped. M = 0
    skips the q-expansion (numerical routes only need the terms).
    """
    merged: dict[tuple[int, int, int], object] = {}
    for term in terms:
        a, b, c = term[:3]
        lam = _as_coefficient(term[3] if len(term) > 3 else 1)
        key = _admissible(a, b, c, N)
        merged[key] = merged.get(key, 0) + lam
    reduced = tuple((a, b, c, lam) for (a, b, c), lam in sorted(merged.items()) if lam != 0)
    exact = all(isinstance(lam, (int, Fraction, CycElt)) for *_, lam in reduced)
    constant = CycElt.rational(N, 0) if exact else 0j
    for a, b, c, lam in reduced:
        k = combo_constant(a, b, c, N)
        constant = constant + (k * lam if exact else k.embed() * lam)
    qexp = None
    if M > 0:
        qexp = QExp.zero(N)
        if not exact:
            qexp = qexp.to_complex()
        for a, b, c, lam in reduced:
            e = lambda x, y: eisenstein_qexp(x, y, N, M).qexp  # noqa: E731
            f = e(a, b * c) * e(b, -a * c) - e(a, -b * c) * e(b, a * c)
            qexp = qexp + f * lam
        if not reduced:
            qexp = QExp.zero(N)
    return WeightTwoCombo(N, reduced, qexp, constant)


def combo_coeffs(combo: WeightTwoCombo, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Complex coefficients (q^0..q^K) of the combination f and of its partner g~.

    g~ = sum lambda (e~_{a,bc} e~_{b,-ac} - e~_{a,-bc} e~_{b,ac}), which satisfies
    f(i/(N^2 u)) = -N^4 u^2 g~(iu).
    """
    N = combo.level
    f = np.zeros(K + 1, dtype=complex)
    g = np.zeros(K + 1, dtype=complex)
    for a, b, c, lam in combo.terms:
        lam_c = lam.embed() if isinstance(lam, CycElt) else complex(lam)
        e = lambda x, y: eisenstein_coeffs(x, y, N, K)  # noqa: E731
        et = lambda x, y: eisenstein_tilde_coeffs(x, y, N, K).astype(float)  # noqa: E731
        f += lam_c * (np.convolve(e(a, b * c), e(b, -a * c))[: K + 1]
                      - np.convolve(e(a, -b * c), e(b, a * c))[: K + 1])
        g += lam_c * (np.convolve(et(a, b * c), et(b, -a * c))[: K + 1]
                      - np.convolve(et(a, -b * c), et(b, a * c))[: K + 1])
    return f, g


_TERM_RE = re.compile(r"^\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*(?::\s*(\S+))?\s*$")


def parse_combo(text: str) -> list[tuple[int, int, int, object]]:
    """Parse "a,b,c:lambda;a,b,c:lambda;..." with lambda a rational or decimal literal."""
    terms = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        mt = _TERM_RE.match(part)
        if not mt:
            raise ValueError(f"bad combo term {part!r}; expected a,b,c:lambda")
        a, b, c = (int(mt.group(i)) for i in (1, 2, 3))
        raw = mt.group(4) or "1"
        try:
            lam = Fraction(raw)
        except ValueError:
            lam = complex(raw.replace("i", "j"))
        terms.append((a, b, c, lam))
    return terms
