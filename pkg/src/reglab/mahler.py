"""Logarithmic Mahler measures by direct quadrature.

Three routes:

* the family k + x + 1/x + y + 1/y, where Jensen's formula in y leaves
  (1/pi) int_0^pi log max(|y_1|, |y_2|) dtheta over the roots of
  y^2 + (k + 2 cos theta) y + 1;
* general two-variable Laurent polynomials, with the roots in y found per
  node as companion-matrix eigenvalues and a globally adaptive
  Gauss-Legendre rule;
* the three-variable polynomial (1 + x)(1 + y) - z, which Jensen in z turns
  into an integral of log+ |(1 + x)(1 + y)| over the torus.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .quadrature import NumericResult, gauss_legendre
from .special import clausen2

__all__ = [
    "LaurentPoly2",
    "mahler_1var",
    "mahler_family",
    "mahler_family_series",
    "mahler_2var",
    "mahler_3var_boyd",
    "boyd_measure_clausen",
]

TWO_PI = 2 * math.pi
MAX_DEGREE = 16
# panel discrepancies understate the error of the refined rule next to
# square-root points by up to about 2x; this factor keeps errbound honest
SAFETY = 3.0


@dataclass(frozen=True)
class LaurentPoly2:
    """P(x, y) = sum c_ij x^i y^j with finitely many nonzero complex coefficients."""

    terms: tuple  # sorted ((i, j), c) pairs, c != 0

    def __post_init__(self):
        if not self.terms:
            raise ValueError("the zero polynomial has no Mahler measure")
        for (i, j), _c in self.terms:
            if abs(i) > MAX_DEGREE or abs(j) > MAX_DEGREE:
                raise ValueError(f"exponent ({i}, {j}) exceeds the supported degree {MAX_DEGREE}")

    @classmethod
    def from_dict(cls, coeffs: dict) -> "LaurentPoly2":
        acc: dict[tuple[int, int], complex] = {}
        for (i, j), c in coeffs.items():
            acc[(int(i), int(j))] = acc.get((int(i), int(j)), 0) + complex(c)
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    @classmethod
    def family(cls, k: complex) -> "LaurentPoly2":
        """k + x + 1/x + y + 1/y."""
        return cls.from_dict({(0, 0): k, (1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def swap(self) -> "LaurentPoly2":
        """P(y, x)."""
        return LaurentPoly2.from_dict({(j, i): c for (i, j), c in self.terms})

    def reciprocal_x(self) -> "LaurentPoly2":
        """x^d P(1/x, y) with d the largest x-exponent."""
        d = max(i for (i, _), _ in self.terms)
        return LaurentPoly2.from_dict({(d - i, j): c for (i, j), c in self.terms})

    def scale(self, s: complex) -> "LaurentPoly2":
        return LaurentPoly2.from_dict({k: s * c for k, c in self.terms})

    def to_json(self) -> dict:
        return {"terms": [{"i": i, "j": j, "re": c.real, "im": c.imag} for (i, j), c in self.terms]}

    @classmethod
    def from_json(cls, data: dict) -> "LaurentPoly2":
        return cls.from_dict({(t["i"], t["j"]): complex(t.get("re", 0.0), t.get("im", 0.0))
                              for t in data["terms"]})


def mahler_1var(coeffs: dict) -> float:
    """Jensen: m(P) = log|leading coefficient| + sum log+ |roots| for P = sum c_i x^i."""
    items = {int(i): complex(c) for i, c in coeffs.items() if c != 0}
    if not items:
        raise ValueError("the zero polynomial has no Mahler measure")
    lo, hi = min(items), max(items)
    poly = [items.get(i, 0) for i in range(hi, lo - 1, -1)]
    roots = np.roots(poly) if hi > lo else np.array([])
    return math.log(abs(poly[0])) + math.fsum(np.log(np.maximum(np.abs(roots), 1.0)))


# -- the k-family ------------------------------------------------------------

def _family_integrand(k: complex, theta: np.ndarray) -> np.ndarray:
    w = k + 2 * np.cos(theta)
    s = np.sqrt(w * w - 4 + 0j)
    big = np.maximum(np.abs(-w + s), np.abs(-w - s)) / 2
    return np.log(np.maximum(big, 1.0))


def _family_breakpoints(k: complex) -> list[float]:
    # |k + 2c| = 2 with c = cos(theta): 4c^2 + 4 Re(k) c + |k|^2 - 4 = 0
    disc = 16 * k.real**2 - 16 * (abs(k) ** 2 - 4)
    pts = [0.0, math.pi]
    if disc >= 0:
        for sgn in (-1, 1):
            c = (-4 * k.real + sgn * math.sqrt(disc)) / 8
            if -1 < c < 1:
                pts.append(math.acos(c))
    return sorted(set(pts))


def _sin2_panel(f, lo: float, hi: float, n: int) -> float:
    """int_lo^hi f under theta = lo + (hi - lo) sin^2(phi), which smooths square-root endpoints."""
    x, w = gauss_legendre(n)
    phi = (x + 1) * (math.pi / 4)
    theta = lo + (hi - lo) * np.sin(phi) ** 2
    jac = (hi - lo) * np.sin(2 * phi) * (math.pi / 4)
    return math.fsum(w * jac * f(theta))


def mahler_family(k: complex, tol: float = 1e-10, max_nodes: int = 2**14) -> NumericResult:
    """m(k + x + 1/x + y + 1/y) by panel-wise Gauss-Legendre quadrature.

    The range [0, pi] is split where |k + 2 cos theta| = 2; for real k these
    are the points where the two roots meet on the unit circle. Each panel
    doubles its node count until two successive rules agree.
    """
    k = complex(k)
    f = lambda th: _family_integrand(k, th)  # noqa: E731
    pts = _family_breakpoints(k)
    panels = list(zip(pts[:-1], pts[1:]))
    share = tol / (2 * len(panels))
    total, err, nodes = [], 0.0, 0
    converged = True
    for lo, hi in panels:
        n = 16
        prev = _sin2_panel(f, lo, hi, n)
        nodes += n
        while True:
            n *= 2
            cur = _sin2_panel(f, lo, hi, n)
            nodes += n
            diff = abs(cur - prev)
            prev = cur
            if diff < share or n >= 1024 or nodes > max_nodes:
                break
        if diff >= share:
            converged = False
        total.append(prev)
        err += diff
    value = math.fsum(total) / math.pi
    err = err / math.pi + 1e-15 * (1 + abs(value))
    res = NumericResult(value, err, {"nodes": nodes, "panels": len(panels)}, converged and err < tol)
    return res


def mahler_family_series(k: complex, tol: float = 1e-15) -> float:
    """log|k| - Re sum_n binom(2n, n)^2 / (2n k^(2n)), convergent for |k| > 4."""
    k = complex(k)
    if abs(k) <= 4:
        raise ValueError(f"the expansion in 1/k needs |k| > 4, got {k}")
    z = 1 / (k * k)
    terms = []
    b = 1.0  # binom(2n, n)
    zn = 1.0 + 0j
    n = 0
    while True:
        n += 1
        b *= 2 * (2 * n - 1) / n
        zn *= z
        t = b * b * zn / (2 * n)
        terms.append(t.real)
        if abs(t) < tol * (1 - 16 * abs(z)):
            break
    return math.log(abs(k)) - math.fsum(terms)


# -- general two-variable polynomials ---------------------------------------

class _RootIntegrand:
    """theta -> sum_j log+ |y_j(e^(i theta))| for the roots in y of P(e^(i theta), y)."""

    def __init__(self, P: LaurentPoly2):
        terms = P.as_dict()
        js = [j for (_, j) in terms]
        self.jmin, self.jmax = min(js), max(js)
        self.deg = self.jmax - self.jmin
        self.cols = []  # per power of y: (x-exponents, coefficients)
        for j in range(self.jmin, self.jmax + 1):
            row = [(i, c) for (i, jj), c in terms.items() if jj == j]
            self.cols.append((np.array([i for i, _ in row], dtype=float),
                              np.array([c for _, c in row], dtype=complex)))
        self.lead = {i: c for (i, j), c in terms.items() if j == self.jmax}

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.deg == 0:
            return np.zeros(theta.shape)
        coef = np.empty((theta.size, self.deg + 1), dtype=complex)
        for col, (ex, cs) in enumerate(self.cols):
            if ex.size:
                coef[:, col] = np.exp(1j * np.outer(theta, ex)) @ cs
            else:
                coef[:, col] = 0
        a0 = coef[:, -1]
        # guard exact zeros of the leading coefficient (a measure-zero set)
        tiny = np.abs(a0) < 1e-300
        a0 = np.where(tiny, 1e-300, a0)
        monic = coef[:, :-1] / a0[:, None]
        comp = np.zeros((theta.size, self.deg, self.deg), dtype=complex)
        comp[:, 0, :] = -monic[:, ::-1]
        if self.deg > 1:
            idx = np.arange(self.deg - 1)
            comp[:, idx + 1, idx] = 1
        roots = np.linalg.eigvals(comp)
        return np.sum(np.log(np.maximum(np.abs(roots), 1.0)), axis=1)


def _gl_panel(f, lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
    x, w = gauss_legendre(n)
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return half * (vals @ w)


def mahler_2var(P: LaurentPoly2, tol: float = 1e-8, max_nodes: int = 2**14,
                order: int = 10) -> NumericResult:
    """m(P) = m(a_0) + (1/2 pi) int_0^(2 pi) sum_j log+ |y_j(theta)| dtheta.

    a_0(x) is the coefficient of the top power of y and is handled by Jensen
    in x. The integral is globally adaptive: each panel compares a
    Gauss-Legendre rule on the whole panel with the same rule on its halves,
    and the panels with the largest discrepancies are bisected until the
    total falls below ``tol``. Kinks where a root crosses the unit circle and
    square-root points where roots meet are absorbed by this refinement.
    Each panel's error is taken as SAFETY times its discrepancy.
    """
    g = _RootIntegrand(P)
    m0 = mahler_1var(g.lead)
    if g.deg == 0:
        return NumericResult(m0, 1e-15 * (1 + abs(m0)), {"nodes": 0})
    f = lambda th: g(th) / TWO_PI  # noqa: E731
    n_init = 16
    edges = np.linspace(0.0, TWO_PI, n_init + 1)
    los, his = edges[:-1], edges[1:]
    nodes = 0

    def assess(lo, hi):
        nonlocal nodes
        mid = (lo + hi) / 2
        whole = _gl_panel(f, lo, hi, order)
        left = _gl_panel(f, lo, mid, order)
        right = _gl_panel(f, mid, hi, order)
        nodes += 3 * order * lo.size
        return left + right, np.abs(whole - left - right)

    vals, errs = assess(los, his)
    heap = [(-SAFETY * e, lo, hi, v) for e, lo, hi, v in zip(errs, los, his, vals)]
    heapq.heapify(heap)
    final = []  # panels too narrow to split further
    min_width = TWO_PI * 1e-13

    def total_err():
        return math.fsum(-item[0] for item in heap) + math.fsum(-item[0] for item in final)

    while heap and total_err() > tol and nodes < max_nodes:
        # bisect every panel above the mean share, at least the worst one
        cut = tol / (2 * (len(heap) + len(final)))
        batch = []
        while heap and (-heap[0][0] > cut or not batch) and len(batch) < 64:
            item = heapq.heappop(heap)
            (final if item[2] - item[1] < min_width else batch).append(item)
        if not batch:
            continue
        lo = np.repeat([b[1] for b in batch], 2)
        hi = np.repeat([b[2] for b in batch], 2)
        mids = np.array([(b[1] + b[2]) / 2 for b in batch])
        lo[1::2] = mids
        hi[0::2] = mids
        v, e = assess(lo, hi)
        for item in zip(-SAFETY * e, lo, hi, v):
            heapq.heappush(heap, item)
    panels = sorted(heap + final, key=lambda item: item[1])
    integral = math.fsum(item[3] for item in panels)
    err = total_err() + 1e-14 * (1 + abs(integral))
    value = m0 + integral
    return NumericResult(value, err, {"nodes": nodes, "panels": len(panels)}, err <= tol)


# -- the three-variable example --------------------------------------------

_THETA_STAR = 2 * math.acos(0.25)  # 4 cos(theta/2) = 1


def _boyd_sum(n: int, swap: bool = False) -> float:
    """(1/pi^2) int int over {4 cos(theta/2) cos(phi/2) > 1} of log(4 cos(theta/2) cos(phi/2)).

    Outer variable theta on [0, theta*] under theta = theta* sin^2(psi) (the
    cross-section integral vanishes like (theta* - theta)^(3/2)), inner
    variable phi on [0, phi*(theta)] with 4 cos(theta/2) cos(phi*/2) = 1.
    The integrand there is analytic, so the tensor rule converges geometrically.
    """
    x, w = gauss_legendre(n)
    psi = (x + 1) * (math.pi / 4)
    theta = _THETA_STAR * np.sin(psi) ** 2
    jac = _THETA_STAR * np.sin(2 * psi) * (math.pi / 4)
    A = 4 * np.cos(theta / 2)
    phi_star = 2 * np.arccos(np.minimum(1.0, 1.0 / A))
    phi = (x[None, :] + 1) / 2 * phi_star[:, None]  # rows: theta nodes
    outer = np.broadcast_to(theta[:, None], phi.shape)
    if swap:
        vals = np.log(4 * np.cos(phi / 2) * np.cos(outer / 2))
    else:
        vals = np.log(4 * np.cos(outer / 2) * np.cos(phi / 2))
    inner = (vals @ w) * phi_star / 2
    return math.fsum(jac * w * inner) / math.pi**2


def mahler_3var_boyd(tol: float = 1e-10, swap: bool = False, max_order: int = 1024) -> NumericResult:
    """m((1 + x)(1 + y) - z) = (1/4 pi^2) int int log+ |(1 + e^(i theta))(1 + e^(i phi))|.

    The tensor Gauss-Legendre rule is run on the mapped region at n and 2n
    nodes per axis; ``details`` records the coarse and fine values, whose
    difference is the error estimate.
    """
    n = 8
    coarse = _boyd_sum(n, swap)
    while True:
        fine = _boyd_sum(2 * n, swap)
        diff = abs(fine - coarse)
        if diff < tol / 2 or 2 * n >= max_order:
            break
        n *= 2
        coarse = fine
    err = diff + 1e-15
    res = NumericResult(fine, err, {"nodes": (2 * n) ** 2}, err < tol)
    res.details = {"coarse": coarse, "fine": fine, "order": 2 * n}
    return res


def boyd_measure_clausen(tol: float = 1e-12) -> NumericResult:
    """The same measure with the inner integral in closed form.

    int_0^phi* log(A cos(phi/2)) dphi = phi* log(A/2) + Cl2(pi - phi*), leaving a
    one-dimensional Gauss-Legendre integral in theta.
    """
    def outer(n):
        x, w = gauss_legendre(n)
        psi = (x + 1) * (math.pi / 4)
        theta = _THETA_STAR * np.sin(psi) ** 2
        jac = _THETA_STAR * np.sin(2 * psi) * (math.pi / 4)
        A = 4 * np.cos(theta / 2)
        phi_star = 2 * np.arccos(np.minimum(1.0, 1.0 / A))
        F = phi_star * np.log(A / 2) + np.array([clausen2(math.pi - p) for p in phi_star])
        return math.fsum(jac * w * F) / math.pi**2

    n = 16
    prev = outer(n)
    while True:
        n *= 2
        cur = outer(n)
        if abs(cur - prev) < tol / 2 or n >= 1024:
            break
        prev = cur
    err = abs(cur - prev) + 1e-15
    return NumericResult(cur, err, {"nodes": n}, err < tol)
