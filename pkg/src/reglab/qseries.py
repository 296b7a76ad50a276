"""Truncated q-expansions with a fractional leading exponent.

A series of level N is stored as

    q^(lead/D) * (c_0 + c_1 q + ... + c_{M-1} q^(M-1) + O(q^M)),   D = 24N,

so every exponent is an integer in units of 1/D while the coefficient
vector steps by whole powers of q. Three coefficient kinds exist:
"rational", "cyclotomic" (elements of Q(zeta_F) for a field level F) and
"complex". Exact kinds keep an integer numerator matrix with one column
per power-basis vector plus a common denominator.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclotomic import CycElt, cyc_embed, cyclotomic_polynomial, power_table

__all__ = [
    "QExp",
    "qexp_qdq",
    "qexp_dlog",
    "qexp_eta",
    "qexp_eta_quotient",
    "qexp_eval",
    "euler_product",
    "divisor_pairs",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 400

# products of this size are safe to accumulate in int64
_INT64_SAFE = 2**62


def _maxabs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return max(abs(int(x)) for x in arr.flat)


def _gcd_all(arr: np.ndarray, start: int) -> int:
    g = start
    for x in arr.flat:
        if g == 1:
            break
        g = math.gcd(g, int(x))
    return g


@lru_cache(maxsize=None)
def _lift_matrix(src: int, dst: int) -> np.ndarray:
    """Matrix sending power-basis coordinates in Q(zeta_src) to Q(zeta_dst)."""
    step = dst // src
    w_src = len(cyclotomic_polynomial(src)) - 1
    table = power_table(dst)
    rows = [table[(j * step) % dst] for j in range(w_src)]
    return np.array(rows, dtype=np.int64).astype(object)


def _mult_matrix(x: CycElt) -> tuple[np.ndarray, int]:
    """Integer matrix of multiplication by ``x`` (row-vector convention) and its denominator."""
    den = 1
    for c in x.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    w = len(x.coeffs)
    rows = []
    for j in range(w):
        prod = x * CycElt.zeta(x.level, j)
        rows.append([int(c * den) for c in prod.coeffs])
    return np.array(rows, dtype=object).reshape(w, w), den


def _reduce_poly_columns(out: np.ndarray, field: int) -> np.ndarray:
    """Reduce columns of degree >= phi(F) using the cyclotomic relation."""
    phi = cyclotomic_polynomial(field)
    w = len(phi) - 1
    for d in range(out.shape[1] - 1, w - 1, -1):
        col = out[:, d]
        if any(col):
            for j in range(w):
                if phi[j]:
                    out[:, d - w + j] -= col * phi[j]
    return out[:, :w]


def _conv_exact(A: np.ndarray, B: np.ndarray, M: int, field: int) -> np.ndarray:
    """Truncated product of two numerator matrices, reduced mod Phi_F."""
    w = A.shape[1]
    M = min(M, A.shape[0], B.shape[0])
    A = A[:M]
    B = B[:M]
    if M == 0:
        return np.zeros((0, w), dtype=object)
    fast = _maxabs(A) * _maxabs(B) * M * w < _INT64_SAFE
    if fast:
        A = A.astype(np.int64)
        B = B.astype(np.int64)
        out = np.zeros((M, 2 * w - 1), dtype=np.int64)
    else:
        out = np.zeros((M, 2 * w - 1), dtype=object)
    cols_a = [i for i in range(w) if A[:, i].any()]
    cols_b = [j for j in range(w) if B[:, j].any()]
    for i in cols_a:
        for j in cols_b:
            out[:, i + j] += np.convolve(A[:, i], B[:, j])[:M]
    if fast:
        out = out.astype(object)
    return _reduce_poly_columns(out, field)


class QExp:
    """Immutable truncated q-expansion; see the module docstring for the layout.

    A series flagged ``polynomial`` is exact: every term beyond the stored
    ones is zero. Such series never limit the precision of a sum or product.
    """

    __slots__ = ("level", "lead", "kind", "field", "polynomial", "_num", "_den", "_c")

    # -- construction ---------------------------------------------------
    @classmethod
    def _exact(cls, level, lead, field, num, den=1, normalize=True, polynomial=False) -> "QExp":
        obj = cls.__new__(cls)
        obj.level = int(level)
        obj.lead = int(lead)
        obj.field = int(field)
        obj.kind = "rational" if field == 1 else "cyclotomic"
        obj.polynomial = bool(polynomial)
        obj._num = num
        obj._den = int(den)
        obj._c = None
        if normalize:
            obj._normalize()
        return obj

    @classmethod
    def _complex(cls, level, lead, arr, normalize=True, polynomial=False) -> "QExp":
        obj = cls.__new__(cls)
        obj.level = int(level)
        obj.lead = int(lead)
        obj.field = 0
        obj.kind = "complex"
        obj.polynomial = bool(polynomial)
        obj._num = None
        obj._den = 1
        obj._c = np.asarray(arr, dtype=complex)
        if normalize:
            obj._normalize()
        return obj

    def _like(self, lead, data, den=1, field=None, polynomial=None, normalize=True) -> "QExp":
        """New series of the same kind as ``self`` from raw storage."""
        poly = self.polynomial if polynomial is None else polynomial
        if self._c is not None:
            return QExp._complex(self.level, lead, data, normalize, poly)
        return QExp._exact(self.level, lead, self.field if field is None else field,
                           data, den, normalize, poly)

    @classmethod
    def from_coeffs(cls, level: int, lead: int, coeffs, kind: str | None = None,
                    field: int | None = None, polynomial: bool = False) -> "QExp":
        """Build a series from a coefficient list (ints, Fractions, CycElts or complex).

        ``lead`` is in units of 1/(24*level); consecutive coefficients step by q^1.
        """
        if level < 1:
            raise ValueError(f"level must be positive, got {level}")
        coeffs = list(coeffs)
        if kind is None:
            if any(isinstance(c, (complex, float, np.floating, np.complexfloating)) for c in coeffs):
                kind = "complex"
            elif any(isinstance(c, CycElt) for c in coeffs):
                kind = "cyclotomic"
            else:
                kind = "rational"
        if kind == "complex":
            vals = [cyc_embed(c) if isinstance(c, CycElt) else complex(c) for c in coeffs]
            return cls._complex(level, lead, np.array(vals, dtype=complex), polynomial=polynomial)
        if kind == "rational":
            field = 1
        elif kind != "cyclotomic":
            raise ValueError(f"unknown coefficient kind {kind!r}")
        elif field is None:
            field = 1
            for c in coeffs:
                if isinstance(c, CycElt):
                    field = field * c.level // math.gcd(field, c.level)
        w = len(cyclotomic_polynomial(field)) - 1
        rows = []
        for c in coeffs:
            if isinstance(c, CycElt):
                if field % c.level:
                    raise ValueError(f"coefficient in Q(zeta_{c.level}) not in Q(zeta_{field})")
                rows.append(c.lift(field).coeffs)
            else:
                rows.append((Fraction(c),) + (Fraction(0),) * (w - 1))
        den = 1
        for r in rows:
            for x in r:
                den = den * x.denominator // math.gcd(den, x.denominator)
        num = np.array([[int(x * den) for x in r] for r in rows], dtype=object).reshape(len(rows), w)
        return cls._exact(level, lead, field, num, den, polynomial=polynomial)

    @classmethod
    def monomial(cls, level: int, lead: int, coeff=1) -> "QExp":
        """The exact series coeff * q^(lead/D)."""
        return cls.from_coeffs(level, lead, [coeff], polynomial=True)

    @classmethod
    def zero(cls, level: int, precision: int | None = None) -> "QExp":
        """Zero; exact when ``precision`` is None, else known only below q^(precision/D)."""
        return cls._exact(level, 0 if precision is None else precision, 1,
                          np.zeros((0, 1), dtype=object), 1, polynomial=precision is None)

    def _normalize(self):
        D = self.expdenom
        if self._c is not None:
            nz = np.flatnonzero(self._c)
            k = int(nz[0]) if nz.size else self._c.shape[0]
            if k:
                self._c = self._c[k:]
                self.lead += k * D
            if self.polynomial:
                nz = np.flatnonzero(self._c)
                self._c = self._c[: int(nz[-1]) + 1] if nz.size else self._c[:0]
            if self.polynomial and self._c.shape[0] == 0:
                self.lead = 0
            return
        num = self._num
        if num.shape[0]:
            rows = np.flatnonzero(np.any(num != 0, axis=1))
            k = int(rows[0]) if rows.size else num.shape[0]
            if k:
                num = num[k:]
                self.lead += k * D
            if self.polynomial:
                num = num[: int(rows[-1]) - k + 1] if rows.size else num[:0]
        g = _gcd_all(num, self._den)
        if g > 1:
            num = num // g
            self._den //= g
        if num.shape[0] == 0:
            self._den = 1
            if self.polynomial:
                self.lead = 0
        self._num = num

    # -- basic properties -----------------------------------------------
    @property
    def expdenom(self) -> int:
        return 24 * self.level

    @property
    def order(self) -> int:
        """Number of stored coefficients; the series is known modulo q^(lead/D + order)."""
        return self._c.shape[0] if self._c is not None else self._num.shape[0]

    @property
    def precision(self) -> float | int:
        """Exponent (in 1/D units) of the first unknown term; infinite for polynomials."""
        if self.polynomial:
            return math.inf
        return self.lead + self.order * self.expdenom

    @property
    def lead_exponent(self) -> Fraction:
        return Fraction(self.lead, self.expdenom)

    def is_exact(self) -> bool:
        return self.kind != "complex"

    def is_zero(self) -> bool:
        return self.order == 0

    @property
    def coeffs(self) -> list:
        """Stored coefficients as Fractions, CycElts or complex numbers."""
        if self._c is not None:
            return [complex(x) for x in self._c]
        return [self._coeff_exact(k) for k in range(self.order)]

    def coeff(self, k: int):
        """The k-th stored coefficient (exponent lead/D + k); zero past the end of a polynomial."""
        if k >= self.order:
            if self.polynomial:
                return 0j if self._c is not None else Fraction(0)
            raise IndexError(f"coefficient {k} is beyond the stored order {self.order}")
        if self._c is not None:
            return complex(self._c[k])
        return self._coeff_exact(k)

    def _coeff_exact(self, k: int):
        r = self._num[k]
        if self.field == 1:
            return Fraction(int(r[0]), self._den)
        return CycElt(self.field, [Fraction(int(x), self._den) for x in r])

    def complex_coeffs(self) -> np.ndarray:
        """Coefficients embedded in C (zeta_F -> exp(2 pi i/F))."""
        if self._c is not None:
            return self._c.copy()
        den = self._den
        vals = np.array([[int(x) / den for x in r] for r in self._num], dtype=float)
        vals = vals.reshape(self.order, -1)
        if self.field == 1:
            return vals[:, 0].astype(complex)
        w = vals.shape[1]
        z = np.exp(2j * np.pi * np.arange(w) / self.field)
        return vals @ z

    def exponent_coeffs(self, count: int) -> np.ndarray:
        """Complex coefficients of q^(lead/D + k) for k < count, zero-padded for polynomials."""
        if count > self.order and not self.polynomial:
            raise ValueError(f"need {count} coefficients, only {self.order} are known")
        out = np.zeros(count, dtype=complex)
        vals = self.complex_coeffs()[:count]
        out[: vals.shape[0]] = vals
        return out

    def truncate(self, order: int) -> "QExp":
        """Forget everything from the ``order``-th stored coefficient on."""
        order = max(0, int(order))
        if self.polynomial and order > self.order:
            return self._pad(order)
        data = self._c[:order] if self._c is not None else self._num[:order]
        return self._like(self.lead, data, self._den, polynomial=False, normalize=False)

    def _pad(self, n: int) -> "QExp":
        """Truncated (non-polynomial) copy with exactly n stored terms; needs a polynomial or n <= order."""
        if n <= self.order:
            data = self._c[:n] if self._c is not None else self._num[:n]
            return self._like(self.lead, data, self._den, polynomial=False, normalize=False)
        if not self.polynomial:
            raise ValueError("cannot extend a truncated series")
        if self._c is not None:
            out = np.zeros(n, dtype=complex)
            out[: self.order] = self._c
        else:
            out = np.zeros((n, self._num.shape[1]), dtype=object)
            out[: self.order] = self._num
        return self._like(self.lead, out, self._den, polynomial=False, normalize=False)

    def to_complex(self) -> "QExp":
        if self._c is not None:
            return self
        return QExp._complex(self.level, self.lead, self.complex_coeffs(), False, self.polynomial)

    def lift(self, field: int) -> "QExp":
        """Same series with coefficients viewed in Q(zeta_field)."""
        if self._c is not None:
            raise ValueError("complex series has no coefficient field")
        if field == self.field:
            return self
        if field % self.field:
            raise ValueError(f"Q(zeta_{self.field}) is not contained in Q(zeta_{field})")
        if self.order:
            num = np.dot(self._num, _lift_matrix(self.field, field))
        else:
            num = np.zeros((0, len(cyclotomic_polynomial(field)) - 1), dtype=object)
        return self._like(self.lead, num, self._den, field=field, normalize=False)

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:4])
        more = ", ..." if self.order > 4 else ""
        tail = "" if self.polynomial else f" + O(q^{Fraction(self.precision, self.expdenom)})"
        return (f"QExp(level={self.level}, lead={self.lead_exponent}, kind={self.kind}, "
                f"order={self.order}, [{head}{more}]{tail})")

    # -- equality -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QExp):
            return NotImplemented
        if (self.level, self.lead, self.order, self.kind, self.field, self.polynomial) != (
                other.level, other.lead, other.order, other.kind, other.field, other.polynomial):
            return False
        if self._c is not None:
            return bool(np.array_equal(self._c, other._c))
        return self._den == other._den and bool(np.all(self._num == other._num))

    __hash__ = None

    # -- arithmetic -----------------------------------------------------
    def _check_level(self, other: "QExp"):
        if self.level != other.level:
            raise ValueError(f"level mismatch: {self.level} vs {other.level}")

    @staticmethod
    def _unify(f: "QExp", g: "QExp") -> tuple["QExp", "QExp"]:
        if f.kind == "complex" or g.kind == "complex":
            return f.to_complex(), g.to_complex()
        field = f.field * g.field // math.gcd(f.field, g.field)
        return f.lift(field), g.lift(field)

    def __add__(self, other):
        if not isinstance(other, QExp):
            return self._add_scalar(other)
        self._check_level(other)
        D = self.expdenom
        if self.order and other.order and (self.lead - other.lead) % D:
            raise ValueError("cannot add series whose exponents differ by a non-integer")
        f, g = QExp._unify(self, other)
        if f.polynomial and f.order == 0 and g.polynomial:
            return g
        parts = [s for s in (f, g) if s.order]
        if not parts:
            prec = min(f.precision, g.precision)
            return f._like(0 if prec == math.inf else prec, f._c[:0] if f._c is not None else f._num[:0],
                           polynomial=prec == math.inf)
        lead = min(s.lead for s in parts)
        prec = min(f.precision, g.precision)
        poly = prec == math.inf
        if not poly and prec <= lead:
            return f._like(prec, f._c[:0] if f._c is not None else f._num[:0], polynomial=False)
        if poly:
            M = max((s.lead - lead) // D + s.order for s in parts)
        else:
            M = (prec - lead) // D
        if f.kind == "complex":
            out = np.zeros(M, dtype=complex)
            for s in parts:
                off = (s.lead - lead) // D
                n = min(s.order, M - off)
                if n > 0:
                    out[off:off + n] += s._c[:n]
            return QExp._complex(self.level, lead, out, polynomial=poly)
        w = f._num.shape[1]
        out = np.zeros((M, w), dtype=object)
        for s, scale in ((f, g._den), (g, f._den)):
            if not s.order:
                continue
            off = (s.lead - lead) // D
            n = min(s.order, M - off)
            if n > 0:
                out[off:off + n] += s._num[:n] * scale
        return QExp._exact(self.level, lead, f.field, out, f._den * g._den, polynomial=poly)

    __radd__ = __add__

    def __neg__(self):
        data = -self._c if self._c is not None else -self._num
        return self._like(self.lead, data, self._den, normalize=False)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _add_scalar(self, value):
        if isinstance(value, (int, Fraction)) and value == 0:
            return self
        return self + QExp.monomial(self.level, 0, value)

    def _scale(self, value) -> "QExp":
        if isinstance(value, (bool, np.integer)):
            value = int(value)
        if isinstance(value, (int, Fraction)):
            if self._c is not None:
                return self._like(self.lead, self._c * float(value))
            value = Fraction(value)
            return self._like(self.lead, self._num * value.numerator, self._den * value.denominator)
        if isinstance(value, CycElt):
            if self._c is not None:
                return self._like(self.lead, self._c * value.embed())
            field = self.field * value.level // math.gcd(self.field, value.level)
            f = self.lift(field)
            mat, den = _mult_matrix(value.lift(field))
            num = np.dot(f._num, mat) if f.order else f._num
            return f._like(self.lead, num, f._den * den, field=field)
        if isinstance(value, (complex, float, np.number)):
            return QExp._complex(self.level, self.lead, self.complex_coeffs() * complex(value),
                                 polynomial=self.polynomial)
        return NotImplemented

    def __mul__(self, other):
        if not isinstance(other, QExp):
            return self._scale(other)
        self._check_level(other)
        f, g = QExp._unify(self, other)
        lead = f.lead + g.lead
        if f.polynomial and g.polynomial:
            M = f.order + g.order - 1 if f.order and g.order else 0
            poly = True
        else:
            M = min(s.order for s in (f, g) if not s.polynomial)
            if f.order == 0 or g.order == 0:
                M = 0
            poly = False
            # an exact factor is extended with zeros (or cut) to the working length
            f = f._pad(M) if f.polynomial else f
            g = g._pad(M) if g.polynomial else g
        if any(s.polynomial and s.order == 0 for s in (self, other)):
            return QExp.zero(self.level)
        if M == 0:
            # a factor known to vanish below q^P makes the product vanish below q^(P + other lead)
            return QExp.zero(self.level, min(
                s.precision + o.lead for s, o in ((self, other), (other, self)) if not s.polynomial))
        if f.kind == "complex":
            out = np.convolve(f._c, g._c)[:M]
            return QExp._complex(self.level, lead, out, polynomial=poly)
        if poly:
            num = _conv_exact(_zpad(f._num, M), _zpad(g._num, M), M, f.field)
        else:
            num = _conv_exact(f._num, g._num, M, f.field)
        return QExp._exact(self.level, lead, f.field, num, f._den * g._den, polynomial=poly)

    __rmul__ = __mul__

    def inverse(self, order: int | None = None) -> "QExp":
        """1/f by Newton iteration h <- h(2 - f h) on the unit part.

        A polynomial has an infinite inverse; ``order`` (default DEFAULT_ORDER)
        sets how many terms to keep in that case.
        """
        if self.order == 0:
            raise ZeroDivisionError("series has no invertible leading coefficient")
        if self.polynomial:
            M = order if order is not None else max(self.order, DEFAULT_ORDER)
        else:
            M = self.order if order is None else min(order, self.order)
        c0 = self.coeff(0)
        if self._c is not None and abs(c0) == 0:
            raise ZeroDivisionError("leading coefficient vanishes")
        unit = self._like(0, self._c if self._c is not None else self._num, self._den, normalize=False)
        unit = unit._pad(M) if unit.polynomial else unit
        h = QExp.monomial(self.level, 0, 1 / c0)._pad(1)
        n = 1
        while n < M:
            n = min(2 * n, M)
            hn = h._pad_trunc(n)
            fh = unit.truncate(n) * hn
            h = (hn * (2 - fh)).truncate(n)
        return h._like(-self.lead, h._c if h._c is not None else h._num, h._den, normalize=True)

    def _pad_trunc(self, n: int) -> "QExp":
        """Zero-extend a truncated series to n terms (used where the extra terms are corrected later)."""
        if n <= self.order:
            return self.truncate(n)
        if self._c is not None:
            out = np.zeros(n, dtype=complex)
            out[: self.order] = self._c
        else:
            out = _zpad(self._num, n)
        return self._like(self.lead, out, self._den, polynomial=False, normalize=False)

    def __truediv__(self, other):
        if isinstance(other, QExp):
            self._check_level(other)
            if other.polynomial and other.order == 1:
                return self._scale(_recip(other.coeff(0)))._shift(-other.lead)
            if self.polynomial:
                order = max(self.order, other.order, DEFAULT_ORDER)
            else:
                order = self.order if other.polynomial else None
            return self * other.inverse(order)
        return self._scale(_recip(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def _shift(self, units: int) -> "QExp":
        """Multiply by q^(units/D)."""
        data = self._c if self._c is not None else self._num
        return self._like(self.lead + units, data, self._den, normalize=False)

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        n = int(n)
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = QExp.monomial(self.level, 0, 1)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        if self._c is not None:
            coeffs = [[float(c.real), float(c.imag)] for c in self._c]
        elif self.field == 1:
            coeffs = [str(c) for c in self.coeffs]
        else:
            coeffs = [[str(x) for x in c.coeffs] for c in self.coeffs]
        out = {
            "level": self.level,
            "expdenom": self.expdenom,
            "lead": self.lead,
            "kind": self.kind,
            "order": self.order,
            "coeffs": coeffs,
        }
        if self.kind == "cyclotomic":
            out["field"] = self.field
        if self.polynomial:
            out["polynomial"] = True
        return out

    @classmethod
    def from_json(cls, data: dict) -> "QExp":
        level = int(data["level"])
        D = 24 * level
        if int(data.get("expdenom", D)) != D:
            raise ValueError(f"expdenom must be 24*level = {D}")
        lead = int(data["lead"])
        kind = data.get("kind", "rational")
        poly = bool(data.get("polynomial", False))
        raw = data["coeffs"]
        if kind == "complex":
            vals = [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c) for c in raw]
            return cls._complex(level, lead, np.array(vals, dtype=complex), polynomial=poly)
        if kind == "rational":
            return cls.from_coeffs(level, lead, [Fraction(c) for c in raw], kind="rational",
                                   polynomial=poly)
        if kind == "cyclotomic":
            field = int(data.get("field", level))
            elts = [CycElt(field, [Fraction(x) for x in c]) for c in raw]
            return cls.from_coeffs(level, lead, elts, kind="cyclotomic", field=field, polynomial=poly)
        raise ValueError(f"unknown coefficient kind {kind!r}")


def _zpad(num: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n, num.shape[1]), dtype=object)
    k = min(n, num.shape[0])
    out[:k] = num[:k]
    return out


def _recip(x):
    if isinstance(x, (int, Fraction, np.integer)):
        if x == 0:
            raise ZeroDivisionError("division by zero")
        return Fraction(1) / Fraction(int(x) if isinstance(x, np.integer) else x)
    if isinstance(x, CycElt):
        return x.inverse()
    return 1 / complex(x)


def qexp_qdq(f: QExp) -> QExp:
    """Term-wise q d/dq: the coefficient at exponent e gets multiplied by e."""
    D = f.expdenom
    mult = f.lead + D * np.arange(f.order)
    if f._c is not None:
        return f._like(f.lead, f._c * (mult / D))
    num = f._num * mult.astype(object)[:, None]
    return f._like(f.lead, num, f._den * D)


def qexp_dlog(f: QExp) -> QExp:
    """Logarithmic derivative q f'/f; its constant term is the lead exponent of f."""
    if f.order == 0:
        raise ZeroDivisionError("dlog of a series with zero leading coefficient")
    g = qexp_qdq(f) / f
    return g


@lru_cache(maxsize=64)
def _euler_product_cached(M: int, step: int) -> tuple[int, ...]:
    coeffs = [0] * M
    k = 0
    while True:
        hit = False
        for kk in (k, -k) if k else (0,):
            e = step * (kk * (3 * kk - 1) // 2)
            if e < M:
                coeffs[e] += -1 if kk % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return tuple(coeffs)


def euler_product(M: int, step: int = 1) -> np.ndarray:
    """Coefficients of prod_{n>=1}(1 - q^(step*n)) below q^M, via Euler's pentagonal theorem."""
    return np.array(_euler_product_cached(int(M), int(step)), dtype=np.int64)


def qexp_eta(d: int, N: int, M: int = DEFAULT_ORDER) -> QExp:
    """eta(d tau) = q^(d/24) prod (1 - q^(dn)) as a level-N series with integer coefficients."""
    if d < 1 or N < 1 or N % d:
        raise ValueError(f"eta(d tau) needs a positive divisor d of the level; got d={d}, N={N}")
    num = euler_product(M, d).astype(object).reshape(M, 1)
    return QExp._exact(N, d * N, 1, num, 1)


def qexp_eta_quotient(powers: dict[int, int], N: int, M: int = DEFAULT_ORDER) -> QExp:
    """prod_d eta(d tau)^(r_d) for a mapping {d: r_d}."""
    lead = 0
    for d, r in powers.items():
        if d < 1 or N % d:
            raise ValueError(f"{d} does not divide the level {N}")
    if all(r >= 0 for r in powers.values()):
        dense = _eta_product_int64(powers, M)
        if dense is not None:
            lead = sum(r * d * N for d, r in powers.items())
            return QExp._exact(N, lead, 1, dense.astype(object).reshape(M, 1), 1)
    unit = QExp.monomial(N, 0)
    for d, r in sorted(powers.items()):
        if r == 0:
            continue
        if d < 1 or N % d:
            raise ValueError(f"{d} does not divide the level {N}")
        base = QExp._exact(N, 0, 1, euler_product(M, d).astype(object).reshape(M, 1), 1)
        unit = unit * base ** r
        lead += r * d * N
    if unit.polynomial:
        unit = unit._pad(M)
    return unit._shift(lead)


def _eta_product_int64(powers: dict[int, int], M: int) -> np.ndarray | None:
    """prod_d prod_n (1 - q^(dn))^(r_d), r_d >= 0, below q^M by sparse shifts; None on overflow risk."""
    out = np.zeros(M, dtype=np.int64)
    out[0] = 1
    for d, r in sorted(powers.items()):
        base = euler_product(M, d)
        idx = np.nonzero(base)[0]
        for _ in range(r):
            if int(np.abs(out).max()) * idx.size >= 2**62:
                return None
            new = np.zeros(M, dtype=np.int64)
            for j in idx:
                new[j:] += base[j] * out[: M - j]
            out = new
    return out


def qexp_eval(f: QExp, c: int, N: int, t: float) -> tuple[complex, float]:
    """Value of f at tau = c/N + i t and a geometric bound for the truncation tail.

    The tail bound is max|c_k| * |q|^(precision) / (1 - |q|), which assumes the
    unknown coefficients are no larger than the stored ones; it is zero for
    polynomials.
    """
    if not t > 0:
        raise ValueError(f"need t > 0, got {t}")
    if N != f.level:
        raise ValueError(f"series has level {f.level}, evaluation requested at level {N}")
    D = f.expdenom
    if f.order == 0:
        tail = 0.0 if f.polynomial else math.exp(-2 * math.pi * t * f.precision / D)
        return 0j, tail
    E = f.lead + D * np.arange(f.order, dtype=np.int64)
    # exact phase reduction keeps c and c + N bit-identical when exponents are integral
    ph = (E * int(c)) % (D * N)
    z = np.exp(2j * np.pi * ph / (D * N) - 2 * np.pi * t * E / D)
    coeffs = f.complex_coeffs()
    terms = coeffs * z
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    if f.polynomial:
        return value, 0.0
    r = math.exp(-2 * math.pi * t)
    cmax = float(np.max(np.abs(coeffs)))
    tail = cmax * math.exp(-2 * math.pi * t * f.precision / D) / (1 - r)
    return value, tail


@lru_cache(maxsize=16)
def divisor_pairs(K: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All (m, n, m*n) with m, n >= 1 and m*n <= K, sorted by m*n then m."""
    ms, ns = [], []
    for m in range(1, K + 1):
        n = np.arange(1, K // m + 1)
        ms.append(np.full(n.shape, m))
        ns.append(n)
    m = np.concatenate(ms) if ms else np.zeros(0, np.int64)
    n = np.concatenate(ns) if ns else np.zeros(0, np.int64)
    k = m * n
    order = np.lexsort((m, k))
    out = (m[order], n[order], k[order])
    for arr in out:
        arr.setflags(write=False)
    return out

