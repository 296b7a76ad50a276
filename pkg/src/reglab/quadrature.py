"""Shared numerical plumbing: result records, series tail bounds and quadrature rules."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NumericResult",
    "BudgetExceeded",
    "terms_for_tail",
    "majorant_tail",
    "exp_trapezoid",
    "gauss_legendre",
    "thread_count",
    "comparison",
]


class BudgetExceeded(RuntimeError):
    """Raised when a series or quadrature cannot reach its tolerance within the work budget."""


@dataclass
class NumericResult:
    """A computed value with an error bound and work counters.

    ``converged`` is False when the tolerance was not met within budget; the
    value is then the best available estimate and ``errbound`` says how bad it is.
    """

    value: complex | float
    errbound: float
    work: dict = field(default_factory=dict)
    converged: bool = True
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.errbound >= 0:
            raise ValueError(f"errbound must be non-negative, got {self.errbound}")

    @property
    def real(self) -> float:
        return float(np.real(self.value))

    def to_json(self) -> dict:
        v = complex(self.value)
        out = {"errbound": float(self.errbound), "converged": self.converged,
               "work": {k: int(v_) for k, v_ in sorted(self.work.items())}}
        if self.details:
            out["details"] = {k: float(v_) for k, v_ in sorted(self.details.items())}
        if isinstance(self.value, complex) and v.imag != 0:
            out["value"] = [v.real, v.imag]
        else:
            out["value"] = v.real
        return out


def comparison(lhs_name: str, lhs: NumericResult, rhs_name: str, rhs: NumericResult,
               tol: float) -> dict:
    """Report entry comparing two results; passes when |lhs - rhs| <= tol + both errbounds."""
    a, b = complex(lhs.value), complex(rhs.value)
    diff = abs(a - b)
    scale = max(abs(a), abs(b))
    return {"lhs": lhs_name, "rhs": rhs_name, "absdiff": diff,
            "reldiff": diff / scale if scale else 0.0, "tol": tol,
            "errbounds": lhs.errbound + rhs.errbound,
            "pass": bool(diff <= tol + lhs.errbound + rhs.errbound)}


def thread_count() -> int:
    """Worker threads for node-parallel work, from REGLAB_THREADS (default 1)."""
    raw = os.environ.get("REGLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def majorant_tail(r: float, K: int, power: int = 0) -> float:
    """Bound for sum_{k>K} 2 k^power (1 + log k) r^k.

    Coefficients of the logarithmic double series obey |C_k| <= 2 H_k <= 2(1 + log k);
    derivative series pick up the extra k^power. Past the peak the term ratio
    decreases monotonically, so the first term over (1 - ratio) bounds the rest.
    """
    if not 0 <= r < 1:
        raise ValueError(f"ratio must lie in [0, 1), got {r}")
    if r == 0:
        return 0.0
    k = K + 1
    total = 0.0
    # walk forward until the term ratio is safely below one
    while True:
        term = 2 * k**power * (1 + math.log(k)) * r**k
        ratio = r * ((k + 1) / k) ** power * (1 + math.log(k + 1)) / (1 + math.log(k))
        if ratio < 0.999:
            return total + term / (1 - ratio)
        total += term
        k += 1
        if k > K + 10**7:
            return math.inf


def terms_for_tail(r: float, tol: float, power: int = 0, kmax: int = 200_000) -> int:
    """Smallest K with majorant_tail(r, K, power) < tol, or BudgetExceeded past ``kmax``."""
    if r <= 0:
        return 1
    if r >= 1:
        raise BudgetExceeded("series does not converge at this argument")
    lr = -math.log(r)
    # initial guess from r^K ~ tol, refined by doubling / bisection on the bound
    K = max(1, int((math.log(1 / tol) + 3) / lr))
    while majorant_tail(r, K, power) >= tol:
        K *= 2
        if K > kmax:
            raise BudgetExceeded(f"needs more than {kmax} terms for tail < {tol:g} (ratio {r:.6g})")
    lo, hi = max(1, K // 2), K
    if majorant_tail(r, lo, power) < tol:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if majorant_tail(r, mid, power) < tol:
            hi = mid
        else:
            lo = mid
    return hi


def exp_trapezoid(G, tol: float, s_lo: float, s_hi: float, h0: float = 0.25,
                  max_nodes: int = 200_000, end_tol: float | None = None) -> NumericResult:
    """Trapezoid rule for int G(s) ds over the real line, G decaying fast at both ends.

    After the substitution t = e^s the integrands of this package decay
    double-exponentially in s, so the window [s_lo, s_hi] is widened until
    the end values are negligible and the step is halved until two successive
    trapezoid sums agree. ``G`` receives a numpy array of s values and must
    return an array of the same shape.
    """
    end_tol = tol * 1e-3 if end_tol is None else end_tol
    work = {"nodes": 0, "refinements": 0}

    def ends_small(lo, hi):
        vals = np.abs(G(np.array([lo, lo + h0 / 2, hi - h0 / 2, hi])))
        work["nodes"] += 4
        return vals[:2].max() < end_tol, vals[2:].max() < end_tol, vals

    for _ in range(60):
        ok_lo, ok_hi, _vals = ends_small(s_lo, s_hi)
        if ok_lo and ok_hi:
            break
        if not ok_lo:
            s_lo -= 1.0
        if not ok_hi:
            s_hi += 1.0
    else:
        raise BudgetExceeded("integrand does not decay at the ends of the window")
    window_err = float(np.abs(_vals).max()) * h0

    n = max(2, int(math.ceil((s_hi - s_lo) / h0)))
    h = (s_hi - s_lo) / n
    s = s_lo + h * np.arange(n + 1)
    vals = G(s)
    work["nodes"] += s.size
    total = _fsum(vals) - 0.5 * (_first(vals) + _last(vals))
    T = total * h
    scale = _abs_sum(vals) * h
    history = [T]
    while True:
        mids = s_lo + h * (np.arange(n) + 0.5)
        mv = G(mids)
        work["nodes"] += mids.size
        work["refinements"] += 1
        scale += _abs_sum(mv) * h
        total = total + _fsum(mv)
        h /= 2
        n *= 2
        T_new = total * h
        diff = abs(T_new - T)
        T = T_new
        history.append(T)
        rounding = 4e-16 * scale
        if len(history) >= 3 and diff < tol / 4:
            err = diff + window_err + rounding
            return NumericResult(T, float(err), work, converged=err < tol)
        if work["nodes"] > max_nodes:
            err = diff + window_err + rounding
            return NumericResult(T, float(err), work, converged=err < tol)


def _fsum(vals):
    vals = np.asarray(vals)
    if np.iscomplexobj(vals):
        return complex(math.fsum(vals.real), math.fsum(vals.imag))
    return math.fsum(vals)


def _abs_sum(vals):
    return math.fsum(np.abs(np.asarray(vals)))


def _first(vals):
    v = np.asarray(vals)[0]
    return complex(v) if np.iscomplexobj(vals) else float(v)


def _last(vals):
    v = np.asarray(vals)[-1]
    return complex(v) if np.iscomplexobj(vals) else float(v)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1] (numpy's leggauss, cached)."""
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        x.setflags(write=False)
        w.setflags(write=False)
        _GL_CACHE[n] = (x, w)
    return _GL_CACHE[n]
