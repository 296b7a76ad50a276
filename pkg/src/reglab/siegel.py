"""Siegel units g_a of level N.

    g_a(tau) = q^(N B(a/N)/2) prod_{n = a (N)} (1 - q^n) prod_{n = -a (N)} (1 - q^n),

with B(x) = {x}^2 - {x} + 1/6. This module gives their exact q-expansions,
the two analytic expansions of log g_a along the vertical line tau = c/N + it
(one converging for large t, one for small t), and the recovery of unit
products from q-expansions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclotomic import CycElt
from .qseries import DEFAULT_ORDER, QExp, divisor_pairs, qexp_dlog
from .quadrature import terms_for_tail

__all__ = [
    "bernoulli_b2",
    "siegel_lead",
    "siegel_lead_units",
    "siegel_qexp",
    "siegel_log_large_t",
    "siegel_log_small_t",
    "large_t_coeffs",
    "small_t_coeffs",
    "small_t_phase",
    "UnitProduct",
    "CuspPath",
    "unit_factorization",
    "parse_scalar",
    "KMAX",
]

# term budget for the double series (k = m n <= KMAX)
KMAX = 200_000


def bernoulli_b2(x):
    """B(x) = {x}^2 - {x} + 1/6; exact for rationals, float otherwise."""
    if isinstance(x, (int, Fraction)):
        f = Fraction(x) - math.floor(Fraction(x))
        return f * f - f + Fraction(1, 6)
    f = x - math.floor(x)
    return f * f - f + 1 / 6


def _reduce_index(a: int, N: int) -> int:
    if N < 1:
        raise ValueError(f"level must be positive, got {N}")
    r = a % N
    if r == 0:
        raise ValueError(f"g_a is undefined for a = {a} = 0 mod {N}")
    return r


def siegel_lead(a: int, N: int) -> Fraction:
    """Leading q-exponent N B(a/N) / 2 of g_a."""
    _reduce_index(a, N)
    return N * bernoulli_b2(Fraction(a, N)) / 2


def siegel_lead_units(a: int, N: int) -> int:
    """The leading exponent in units of 1/(24N): 12 r^2 - 12 r N + 2 N^2 with r = a mod N."""
    r = _reduce_index(a, N)
    return 12 * r * r - 12 * r * N + 2 * N * N


def _class_product(exponents: dict[int, int], N: int, M: int) -> np.ndarray:
    """Integer coefficients of prod_a [prod_{n = +-a} (1 - q^n)]^(n_a) below q^M."""
    c = np.zeros(M, dtype=object)
    c[0] = 1
    for a, e in sorted(exponents.items()):
        if e == 0:
            continue
        r = a % N
        ns = [n for n in range(1, M) if n % N == r] + [n for n in range(1, M) if n % N == (N - r) % N]
        for n in sorted(ns):
            for _ in range(abs(e)):
                if e > 0:
                    c[n:] = c[n:] - c[:-n]
                else:
                    # divide by (1 - q^n): running sums along each residue class mod n
                    pad = (-M) % n
                    block = np.concatenate([c, np.zeros(pad, dtype=object)]).reshape(-1, n)
                    c = np.cumsum(block, axis=0).reshape(-1)[:M]
    return c


def siegel_qexp(a: int, N: int, M: int = DEFAULT_ORDER) -> QExp:
    """Exact q-expansion of g_a with M stored coefficients."""
    r = _reduce_index(a, N)
    coeffs = _class_product({r: 1}, N, M)
    return QExp._exact(N, siegel_lead_units(r, N), 1, coeffs.reshape(M, 1), 1)


# -- analytic expansions along tau = c/N + i t ---------------------------

def _zeta_powers(N: int, e: np.ndarray) -> np.ndarray:
    return np.exp(2j * np.pi * (np.asarray(e) % N) / N)


@lru_cache(maxsize=512)
def _large_cached(a: int, c: int, N: int, K: int) -> np.ndarray:
    m, n, k = divisor_pairs(K)
    w = np.zeros(m.shape, dtype=complex)
    plus = (n - a) % N == 0
    minus = (n + a) % N == 0
    w[plus] += _zeta_powers(N, a * c * m[plus]) / m[plus]
    w[minus] += _zeta_powers(N, -a * c * m[minus]) / m[minus]
    out = np.zeros(K + 1, dtype=complex)
    np.add.at(out, k, w)
    out.setflags(write=False)
    return out


def large_t_coeffs(a: int, c: int, N: int, K: int) -> np.ndarray:
    """C_k (k = 0..K) with log g_a(c/N + it) = pi i c B(a/N) - pi t N B(a/N) - sum C_k e^(-2 pi k t)."""
    r = _reduce_index(a, N)
    return _large_cached(r, c % N, N, K)


@lru_cache(maxsize=512)
def _small_cached(a: int, c: int, N: int, K: int) -> np.ndarray:
    m, n, k = divisor_pairs(K)
    w = np.zeros(m.shape, dtype=complex)
    plus = (n - a * c) % N == 0
    minus = (n + a * c) % N == 0
    w[plus] += _zeta_powers(N, -a * m[plus]) / m[plus]
    w[minus] += _zeta_powers(N, a * m[minus]) / m[minus]
    out = np.zeros(K + 1, dtype=complex)
    np.add.at(out, k, w)
    out.setflags(write=False)
    return out


def _check_cusp(a: int, c: int, N: int):
    if (a * c) % N == 0:
        raise ValueError(f"g_{a} has no small-t expansion at the cusp {c}/{N}: ac = 0 mod N")


def small_t_coeffs(a: int, c: int, N: int, K: int) -> np.ndarray:
    """D_k (k = 0..K) of the small-t expansion, a series in exp(-2 pi k / (N^2 t))."""
    r = _reduce_index(a, N)
    _check_cusp(r, c, N)
    return _small_cached(r, c % N, N, K)


def small_t_phase(a: int, c: int, N: int) -> Fraction:
    """Constant imaginary part of the small-t expansion, in units of pi i (mod 2).

    With a reduced to 0 < a < N, r = ac mod N and j = (ac - r)/N, the
    constant is pi i (3/2 + c/6 + j + j a/N - (a/N)(r/N - 1)).
    """
    a = _reduce_index(a, N)
    _check_cusp(a, c, N)
    ac = a * c
    r = ac % N
    j = (ac - r) // N
    val = Fraction(3, 2) + Fraction(c, 6) + j + Fraction(j * a, N) - Fraction(a, N) * (Fraction(r, N) - 1)
    return val - 2 * math.floor(val / 2)


def _large_terms(t: float, tol: float, power: int = 0) -> int:
    return terms_for_tail(math.exp(-2 * math.pi * t), tol, power, KMAX)


def _small_terms(t: float, N: int, tol: float, power: int = 0) -> int:
    return terms_for_tail(math.exp(-2 * math.pi / (N * N * t)), tol, power, KMAX)


def siegel_log_large_t(a: int, c: int, N: int, t: float, tol: float = 1e-14) -> complex:
    """log g_a(c/N + it) from the expansion converging for large t.

    Raises BudgetExceeded when t is too small for the term budget; the caller
    should then switch to siegel_log_small_t.
    """
    if not t > 0:
        raise ValueError(f"need t > 0, got {t}")
    r = _reduce_index(a, N)
    K = _large_terms(t, tol)
    C = _large_cached(r, c % N, N, K)
    B = float(bernoulli_b2(Fraction(r, N)))
    ks = np.arange(K + 1)
    S = np.sum(C * np.exp(-2 * np.pi * ks * t))
    return complex(-math.pi * t * N * B, math.pi * c * B) - S


def siegel_log_small_t(a: int, c: int, N: int, t: float, tol: float = 1e-14) -> complex:
    """log g_a(c/N + it) from the expansion in exp(-2 pi/(N^2 t)), converging for small t.

    Agrees with siegel_log_large_t modulo 2 pi i. Requires ac != 0 mod N.
    """
    if not t > 0:
        raise ValueError(f"need t > 0, got {t}")
    r = _reduce_index(a, N)
    _check_cusp(r, c, N)
    K = _small_terms(t, N, tol)
    D = _small_cached(r, c % N, N, K)
    u = 1.0 / (N * N * t)
    ks = np.arange(K + 1)
    S = np.sum(D * np.exp(-2 * np.pi * ks * u))
    Bc = float(bernoulli_b2(Fraction(r * c, N)))
    phase = math.pi * float(small_t_phase(r, c, N))
    return complex(-math.pi * Bc / (N * t), phase) - S


# -- unit products --------------------------------------------------------

_SCALAR_RE = re.compile(
    r"^(?P<sign>[+-])?(?P<rat>\d+(?:/\d+)?)?\*?(?P<i>i)?(?P<sq>(?:\*|/)sqrt2|sqrt2)?$")


def parse_scalar(text: str) -> tuple[complex, CycElt | Fraction | None]:
    """Parse a unit prefactor such as "-i", "1/sqrt2", "3/2", "2*i/sqrt2".

    Returns the complex value and, when the scalar lies in Q(zeta_8), its
    exact value (a Fraction for rationals). Other decimal or complex literals
    are accepted with no exact value.
    """
    s = text.replace(" ", "")
    mt = _SCALAR_RE.match(s)
    if mt and (mt.group("rat") or mt.group("i") or mt.group("sq")):
        val = Fraction(mt.group("rat") or 1)
        if mt.group("sign") == "-":
            val = -val
        sq = mt.group("sq")
        if not mt.group("i") and not sq:
            return complex(val), val
        level = 8 if sq else 4
        x = CycElt.rational(level, val)
        if mt.group("i"):
            x = x * CycElt.zeta(level, level // 4)
        if sq:
            root2 = CycElt.zeta(8, 1) + CycElt.zeta(8, 7)
            x = x / root2 if sq.startswith("/") else x * root2
        return _clean(x.embed()), x
    try:
        z = complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ValueError(f"cannot parse scalar {text!r}") from exc
    return z, None


def _clean(z: complex) -> complex:
    """Drop rounding-level real or imaginary parts of an embedded exact scalar."""
    z = complex(z)
    re_, im_ = z.real, z.imag
    scale = abs(z)
    return complex(0.0 if abs(re_) < 1e-15 * scale else re_, 0.0 if abs(im_) < 1e-15 * scale else im_)


def _exact_key(x) -> str:
    return str(x)


@dataclass(frozen=True)
class UnitProduct:
    """scalar * prod_a g_a^(n_a) at level N, with indices reduced to 1..N//2."""

    level: int
    exponents: dict = field(default_factory=dict)
    scalar: complex = 1 + 0j
    exact_scalar: object = Fraction(1)

    def __post_init__(self):
        N = self.level
        norm: dict[int, int] = {}
        for a, e in self.exponents.items():
            r = _reduce_index(int(a), N)
            r = min(r, N - r)
            norm[r] = norm.get(r, 0) + int(e)
        norm = {a: e for a, e in sorted(norm.items()) if e}
        object.__setattr__(self, "exponents", norm)
        object.__setattr__(self, "scalar", complex(self.scalar))
        if self.scalar == 0:
            raise ValueError("unit scalar must be nonzero")

    @classmethod
    def parse(cls, N: int, text: str) -> "UnitProduct":
        """Parse "7:1,2:-1" optionally followed by "@scalar", e.g. "4:1,1:-1@-1"."""
        body, _, sc = text.partition("@")
        exps: dict[int, int] = {}
        for part in filter(None, body.replace(" ", "").split(",")):
            a, _, e = part.partition(":")
            exps[int(a)] = exps.get(int(a), 0) + int(e or 1)
        if sc:
            z, exact = parse_scalar(sc)
        else:
            z, exact = 1 + 0j, Fraction(1)
        return cls(N, exps, z, exact)

    @property
    def unit_modulus(self) -> bool:
        return abs(abs(self.scalar) - 1) < 1e-12

    @property
    def lead_units(self) -> int:
        return sum(e * siegel_lead_units(a, self.level) for a, e in self.exponents.items())

    def __mul__(self, other: "UnitProduct") -> "UnitProduct":
        if self.level != other.level:
            raise ValueError("level mismatch")
        exps = dict(self.exponents)
        for a, e in other.exponents.items():
            exps[a] = exps.get(a, 0) + e
        exact = None
        if self.exact_scalar is not None and other.exact_scalar is not None:
            exact = _mul_exact(self.exact_scalar, other.exact_scalar)
        return UnitProduct(self.level, exps, self.scalar * other.scalar, exact)

    def inverse(self) -> "UnitProduct":
        exact = None if self.exact_scalar is None else _recip_exact(self.exact_scalar)
        return UnitProduct(self.level, {a: -e for a, e in self.exponents.items()}, 1 / self.scalar, exact)

    def __truediv__(self, other: "UnitProduct") -> "UnitProduct":
        return self * other.inverse()

    def qexp(self, M: int = DEFAULT_ORDER) -> QExp:
        """scalar * prod g_a^(n_a), exact when the scalar is known exactly."""
        coeffs = _class_product(self.exponents, self.level, M)
        f = QExp._exact(self.level, self.lead_units, 1, coeffs.reshape(M, 1), 1)
        if self.exact_scalar is not None:
            return f * self.exact_scalar if self.exact_scalar != 1 else f
        return f * self.scalar

    def to_json(self) -> dict:
        out = {"level": self.level, "exponents": {str(a): e for a, e in self.exponents.items()},
               "scalar": [self.scalar.real, self.scalar.imag], "unit_modulus": self.unit_modulus}
        if self.exact_scalar is not None:
            out["exact_scalar"] = _exact_key(self.exact_scalar)
        return out

    def __str__(self):
        num = [f"g{a}" + (f"^{e}" if e > 1 else "") for a, e in self.exponents.items() if e > 0]
        den = [f"g{a}" + (f"^{-e}" if e < -1 else "") for a, e in self.exponents.items() if e < 0]
        body = "*".join(num) or "1"
        if den:
            body += "/(" + "*".join(den) + ")"
        if self.scalar != 1:
            body = f"({self.scalar:g})*" + body
        return f"{body} [N={self.level}]"


def _mul_exact(x, y):
    if isinstance(x, CycElt) and isinstance(y, CycElt) and x.level != y.level:
        L = x.level * y.level // math.gcd(x.level, y.level)
        return x.lift(L) * y.lift(L)
    return x * y


def _recip_exact(x):
    return x.inverse() if isinstance(x, CycElt) else 1 / Fraction(x)


@dataclass(frozen=True)
class CuspPath:
    """Vertical path from the cusp c/N up to i infinity, or the difference path c/N -> d/N.

    The cusp-to-cusp integral is defined as the integral from c/N to i infinity
    minus the one from d/N to i infinity.
    """

    level: int
    start: int
    end: int | None = None

    @property
    def cusps(self) -> tuple[int, ...]:
        return (self.start,) if self.end is None else (self.start, self.end)

    def __str__(self):
        N = self.level
        tail = "i*inf" if self.end is None else f"{self.end}/{N}"
        return f"{self.start}/{N} -> {tail}"


def _dlog_column_exact(a: int, N: int, K: int) -> list[Fraction]:
    col = [Fraction(0)] * K
    col[0] = siegel_lead(a, N)
    classes = [a % N, (-a) % N]
    for d in range(1, K):
        hits = sum(1 for r in classes if d % N == r)
        if hits:
            for k in range(d, K, d):
                col[k] -= hits * d
    return col


def unit_factorization(f: QExp, N: int | None = None) -> UnitProduct | None:
    """Write f as scalar * prod g_a^(n_a), or return None if no integer solution verifies.

    The exponents solve dlog f = sum n_a dlog g_a on the first N//2 + 20
    coefficients (least squares, then rounding); the candidate is accepted
    only if it reproduces every stored coefficient of dlog f, and the scalar
    is the ratio of leading coefficients.
    """
    N = f.level if N is None else N
    if f.level != N:
        raise ValueError(f"series has level {f.level}, not {N}")
    H = N // 2
    K = H + 20
    if f.order < K:
        raise ValueError(f"need at least {K} stored coefficients for level {N}, got {f.order}")
    dl = qexp_dlog(f)
    M = f.order
    shift = (dl.lead // dl.expdenom) if dl.order else M
    target = np.zeros(M, dtype=complex)
    if dl.order:
        vals = dl.complex_coeffs()
        n = min(M - shift, vals.shape[0])
        target[shift:shift + n] = vals[:n]
    if np.max(np.abs(target.imag)) > 1e-6 * max(1.0, np.max(np.abs(target.real))):
        return None
    A = np.zeros((K, H))
    for ai, a in enumerate(range(1, H + 1)):
        A[:, ai] = [float(x) for x in _dlog_column_exact(a, N, K)]
    sol, *_ = np.linalg.lstsq(A, target.real[:K], rcond=None)
    n_int = np.rint(sol).astype(int)
    if np.max(np.abs(sol - n_int)) > 1e-6:
        return None
    exps = {a: int(e) for a, e in zip(range(1, H + 1), n_int) if e}
    # exact verification on every stored coefficient
    prod = UnitProduct(N, exps).qexp(M)
    if prod.lead != f.lead:
        return None
    if f.is_exact():
        check = dl
        ref = qexp_dlog(prod)
        if not _same_prefix(check, ref, M):
            return None
        scalar_exact = f.coeff(0)
        return UnitProduct(N, exps, _clean(_embed(scalar_exact)), _simplify(scalar_exact))
    ref = qexp_dlog(prod).complex_coeffs()
    cand = dl.complex_coeffs()
    if dl.lead != qexp_dlog(prod).lead or ref.shape != cand.shape:
        return None
    scale = max(1.0, float(np.max(np.abs(ref))))
    if np.max(np.abs(ref - cand)) > 1e-8 * scale:
        return None
    return UnitProduct(N, exps, complex(f.coeff(0)), None)


def _embed(x) -> complex:
    return x.embed() if isinstance(x, CycElt) else complex(x)


def _simplify(x):
    """Collapse a cyclotomic scalar that happens to be rational."""
    if isinstance(x, CycElt) and all(c == 0 for c in x.coeffs[1:]):
        return x.coeffs[0]
    return x


def _same_prefix(f: QExp, g: QExp, M: int) -> bool:
    """Exact equality of two exact series over their common known range."""
    if f.order == 0 or g.order == 0:
        return f.order == g.order and f.lead == g.lead
    if f.lead != g.lead:
        return False
    n = min(f.order, g.order)
    diff = f.truncate(n) - g.truncate(n)
    return diff.order == 0

