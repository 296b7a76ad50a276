"""Integrals of the regulator 1-form eta(g, h) = log|g| d arg h - log|h| d arg g.

Along tau = c/N + it the density of eta(g_a, g_b) with respect to dt is
evaluated from the large-t expansion of log g for t >= t* and from the
small-t expansion below (t* = 1/N by default). Integrals over t in (0, oo)
use the substitution t = e^s and the trapezoid rule.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from .quadrature import NumericResult, exp_trapezoid, terms_for_tail, thread_count
from .siegel import (
    KMAX,
    CuspPath,
    UnitProduct,
    bernoulli_b2,
    large_t_coeffs,
    small_t_coeffs,
)

__all__ = [
    "eta_integrand",
    "regulator_pair",
    "regulator_units",
    "arg_change",
    "check_admissible",
]

TWO_PI = 2 * math.pi
# truncation target for the per-node series; far below any quadrature tolerance
_SERIES_TOL = 1e-17


def check_admissible(a: int, b: int, c: int, N: int):
    for x in (a, b):
        if x % N == 0:
            raise ValueError(f"index {x} is divisible by N = {N}")
        if (x * c) % N == 0:
            raise ValueError(f"pair (a,b) = ({a},{b}) is not admissible at the cusp {c}/{N}: "
                             f"{x}*{c} = 0 mod {N}")


class _PairDensity:
    """Precomputed series for the eta density of (g_a, g_b) along c/N + it."""

    def __init__(self, a: int, b: int, c: int, N: int, switch: float | None = None):
        check_admissible(a, b, c, N)
        self.N = N
        self.switch = 1.0 / N if switch is None else float(switch)
        ts = self.switch
        rL = math.exp(-TWO_PI * ts)
        rS = math.exp(-TWO_PI / (N * N * ts))
        chain = max(1.0, 1.0 / (N * N * ts * ts))
        self.KL = terms_for_tail(rL, _SERIES_TOL / TWO_PI, power=1, kmax=KMAX)
        self.KS = terms_for_tail(rS, _SERIES_TOL / (TWO_PI * chain), power=1, kmax=KMAX)
        self.Ca = large_t_coeffs(a, c, N, self.KL)
        self.Cb = large_t_coeffs(b, c, N, self.KL)
        self.Da = small_t_coeffs(a, c, N, self.KS)
        self.Db = small_t_coeffs(b, c, N, self.KS)
        self.Ba = float(bernoulli_b2(Fraction(a % N, N)))
        self.Bb = float(bernoulli_b2(Fraction(b % N, N)))
        self.Bac = float(bernoulli_b2(Fraction(a * c, N)))
        self.Bbc = float(bernoulli_b2(Fraction(b * c, N)))
        self.kL = np.arange(self.KL + 1)
        self.kS = np.arange(self.KS + 1)
        self.same = (a - b) % N == 0 or (a + b) % N == 0

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape)
        if self.same:
            return out
        N = self.N
        hi = t >= self.switch
        if hi.any():
            th = t[hi]
            E = np.exp(-TWO_PI * np.outer(th, self.kL))
            la = -math.pi * N * self.Ba * th - (E @ self.Ca).real
            lb = -math.pi * N * self.Bb * th - (E @ self.Cb).real
            da = TWO_PI * (E @ (self.kL * self.Ca)).imag
            db = TWO_PI * (E @ (self.kL * self.Cb)).imag
            out[hi] = la * db - lb * da
        lo = ~hi
        if lo.any():
            tl = t[lo]
            u = 1.0 / (N * N * tl)
            E = np.exp(-TWO_PI * np.outer(u, self.kS))
            la = -math.pi * self.Bac / (N * tl) - (E @ self.Da).real
            lb = -math.pi * self.Bbc / (N * tl) - (E @ self.Db).real
            chain = -TWO_PI / (N * N * tl * tl)
            da = chain * (E @ (self.kS * self.Da)).imag
            db = chain * (E @ (self.kS * self.Db)).imag
            out[lo] = la * db - lb * da
        return out


def eta_integrand(a: int, b: int, c: int, N: int, t, tol: float = 1e-14, switch: float | None = None):
    """Density of eta(g_a, g_b) along tau = c/N + it with respect to dt.

    ``t`` may be a scalar or an array. The expansions are truncated far below
    ``tol``; a = +-b gives exactly zero.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("need t > 0")
    vals = _PairDensity(a, b, c, N, switch)(t_arr)
    return float(vals[0]) if t_arr.ndim == 0 else vals


def regulator_pair(a: int, b: int, c: int, N: int, tol: float = 1e-10,
                   switch: float | None = None) -> NumericResult:
    """int_{c/N}^{i oo} eta(g_a, g_b) by trapezoid quadrature in s = log t."""
    dens = _PairDensity(a, b, c, N, switch)
    if dens.same:
        return NumericResult(0.0, 0.0, {"nodes": 0})

    def G(s):
        t = np.exp(s)
        return dens(t) * t

    s_lo = -math.log(N * N) - 6.0
    res = exp_trapezoid(G, tol, s_lo, 2.5, h0=0.25)
    res.value = float(res.value)
    res.work["terms"] = dens.KL + dens.KS
    return res


def arg_change(U: UnitProduct, c: int) -> float:
    """Total change of arg U along c/N + it as t runs from 0 to infinity.

    Continuous and branch-free: sum_a n_a (Im sum_k C_k r^k - Im sum_k D_k r^k), r = exp(-2 pi/N).
    """
    N = U.level
    r = math.exp(-TWO_PI / N)
    K = terms_for_tail(r, _SERIES_TOL, power=0, kmax=KMAX)
    rk = r ** np.arange(K + 1)
    total = []
    for a, e in U.exponents.items():
        C = large_t_coeffs(a, c, N, K)
        D = small_t_coeffs(a, c, N, K)
        total.append(e * (float((C @ rk).imag) - float((D @ rk).imag)))
    return math.fsum(total)


def _pairs(U: UnitProduct, V: UnitProduct):
    """Coefficients of the distinct unordered pairs in eta(U, V) = sum n_a m_b eta(g_a, g_b)."""
    coef: dict[tuple[int, int], int] = {}
    for a, n in U.exponents.items():
        for b, m in V.exponents.items():
            if a == b:
                continue
            key, sign = ((a, b), 1) if a < b else ((b, a), -1)
            coef[key] = coef.get(key, 0) + sign * n * m
    return {k: v for k, v in sorted(coef.items()) if v}


def regulator_units(U: UnitProduct, V: UnitProduct, path: CuspPath, tol: float = 1e-10) -> NumericResult:
    """int over ``path`` of eta(U, V), including the contribution of constant prefactors.

    For U = s V_0 with |s| != 1 the constant contributes log|s| times the
    change of arg along the path (and symmetrically for V).
    """
    N = path.level
    if U.level != N or V.level != N:
        raise ValueError("unit levels must match the path level")
    pairs = _pairs(U, V)
    for c in path.cusps:
        for a in U.exponents:
            for b in V.exponents:
                check_admissible(a, b, c, N)
    jobs = [(a, b, c) for c in path.cusps for (a, b) in pairs]
    n_jobs = max(1, len(jobs))
    per_tol = tol / (2 * n_jobs * max(1, max((abs(v) for v in pairs.values()), default=1)))

    def run(job):
        a, b, c = job
        return regulator_pair(a, b, c, N, per_tol)

    workers = thread_count()
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    by_job = dict(zip(jobs, results))

    values, errs = [], []
    work = {"nodes": 0, "pairs": len(jobs)}
    converged = True
    for idx, c in enumerate(path.cusps):
        sign = 1 if idx == 0 else -1
        for (a, b), coef in pairs.items():
            r = by_job[(a, b, c)]
            values.append(sign * coef * r.value)
            errs.append(abs(coef) * r.errbound)
            work["nodes"] += r.work.get("nodes", 0)
            converged &= r.converged
        # constant prefactors: eta(s, V) = log|s| d arg V, eta(U, s) = -log|s| d arg U
        if not U.unit_modulus:
            values.append(sign * math.log(abs(U.scalar)) * arg_change(V, c))
        if not V.unit_modulus:
            values.append(-sign * math.log(abs(V.scalar)) * arg_change(U, c))
    value = math.fsum(values)
    err = math.fsum(errs) + 1e-15 * (1 + abs(value))
    return NumericResult(value, err, work, converged)
