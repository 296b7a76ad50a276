"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored as rational coefficient vectors in the power basis
1, zeta, ..., zeta^(phi(N)-1), always reduced modulo the N-th cyclotomic
polynomial, so equality is plain coefficient comparison.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "CycElt",
    "cyclotomic_polynomial",
    "euler_phi",
    "power_table",
    "cyc_halfcot",
    "cyc_embed",
]


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _poly_divexact(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Divide integer polynomials (low degree first) with monic ``den``."""
    num = list(num)
    dq = len(den) - 1
    quot = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        quot[i - dq] = c
        if c:
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    if any(num[:dq]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first.

    Obtained by dividing x^n - 1 by Phi_d for every proper divisor d of n.
    """
    if n < 1:
        raise ValueError(f"cyclotomic polynomial needs n >= 1, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def power_table(n: int) -> np.ndarray:
    """Row j holds the reduced coordinates of zeta_n^j, for 0 <= j < n."""
    phi = cyclotomic_polynomial(n)
    w = len(phi) - 1
    table = np.zeros((n, w), dtype=np.int64)
    cur = [0] * w
    cur[0] = 1
    for j in range(n):
        table[j] = cur
        # multiply by x, reduce x^w = -sum phi_i x^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [cur[i] - top * phi[i] for i in range(w)]
    table.setflags(write=False)
    return table


def _reduce(poly: list, n: int) -> tuple[Fraction, ...]:
    phi = cyclotomic_polynomial(n)
    w = len(phi) - 1
    poly = list(poly) + [Fraction(0)] * max(0, w - len(poly))
    for i in range(len(poly) - 1, w - 1, -1):
        c = poly[i]
        if c:
            for j in range(w):
                poly[i - w + j] -= c * phi[j]
    return tuple(Fraction(c) for c in poly[:w])


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return _trim(q), _trim(a[: len(b) - 1])


def _poly_mul(a, b) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a, b) -> list:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


class CycElt:
    """An element of Q(zeta_N) in the reduced power basis."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs=()):
        if level < 1:
            raise ValueError(f"level must be positive, got {level}")
        self.level = level
        self.coeffs = _reduce([Fraction(c) for c in coeffs], level)

    @classmethod
    def _raw(cls, level: int, coeffs: tuple[Fraction, ...]) -> "CycElt":
        obj = cls.__new__(cls)
        obj.level = level
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zeta(cls, level: int, k: int = 1) -> "CycElt":
        row = power_table(level)[k % level]
        return cls._raw(level, tuple(Fraction(int(v)) for v in row))

    @classmethod
    def rational(cls, level: int, x) -> "CycElt":
        return cls(level, [Fraction(x)])

    # -- ring structure -------------------------------------------------
    def _coerce(self, other) -> "CycElt":
        if isinstance(other, CycElt):
            if other.level != self.level:
                raise ValueError(
                    f"level mismatch: Q(zeta_{self.level}) vs Q(zeta_{other.level})"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycElt.rational(self.level, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycElt._raw(self.level, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycElt._raw(self.level, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycElt._raw(self.level, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElt._raw(self.level, tuple(x * other for x in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycElt._raw(self.level, _reduce(_poly_mul(self.coeffs, other.coeffs), self.level))

    __rmul__ = __mul__

    def inverse(self) -> "CycElt":
        """Multiplicative inverse via the extended Euclidean algorithm."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        modulus = [Fraction(c) for c in cyclotomic_polynomial(self.level)]
        r0, r1 = modulus, _trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        # r1 is a nonzero constant since Phi_N is irreducible
        c = r1[0]
        return CycElt(self.level, [x / c for x in s1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return CycElt._raw(self.level, tuple(x / other for x in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = CycElt.rational(self.level, 1)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / display -------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycElt.rational(self.level, other)
        if not isinstance(other, CycElt):
            return NotImplemented
        return self.level == other.level and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.level, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*z^{j}" for j, c in enumerate(self.coeffs) if c]
        return f"CycElt({self.level}: {' + '.join(terms) or '0'})"

    def embed(self) -> complex:
        return cyc_embed(self)

    def lift(self, level: int) -> "CycElt":
        """Image in Q(zeta_L) for a multiple L of the current level."""
        if level % self.level:
            raise ValueError(f"{self.level} does not divide {level}")
        step = level // self.level
        table = power_table(level)
        out = [Fraction(0)] * table.shape[1]
        for j, c in enumerate(self.coeffs):
            if c:
                for i, v in enumerate(table[(j * step) % level]):
                    if v:
                        out[i] += c * int(v)
        return CycElt._raw(level, tuple(out))


def cyc_embed(x: CycElt) -> complex:
    """Complex value of ``x`` under zeta_N -> exp(2 pi i / N)."""
    n = x.level
    re, im = [], []
    for j, c in enumerate(x.coeffs):
        if c:
            z = cmath.exp(2j * math.pi * j / n)
            re.append(float(c) * z.real)
            im.append(float(c) * z.imag)
    return complex(math.fsum(re), math.fsum(im))


@lru_cache(maxsize=None)
def cyc_halfcot(a: int, level: int) -> CycElt:
    """(1 + zeta^a) / (1 - zeta^a), which embeds to i*cot(pi a / N)."""
    if a % level == 0:
        raise ValueError(f"half-cotangent has a pole at a = {a} = 0 mod {level}")
    z = CycElt.zeta(level, a)
    return (1 + z) / (1 - z)
