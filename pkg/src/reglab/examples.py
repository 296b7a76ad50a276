"""Curated modular parameterisations of k + x + 1/x + y + 1/y = 0 and their checks.

Each record gives modular units x, y of level N, the cusp path for the
regulator integral, the weight-2 form f and the rational C with
m(k + x + 1/x + y + 1/y) = (C/pi^2) L(f, 2). Records are JSON files in
``reglab/data``; keys follow the ExampleRecord fields:

    id, level, k, epsilon          k and the normaliser epsilon as scalar literals
    x_unit, y_unit                 unit specs "a:n,...@scalar" at level N, or
    x_eta, y_eta                   {"scalar", "powers": {d: r}} eta quotients
    x_lambda, y_lambda             optional products of lambda(d tau) for cross-checks
    paths                          [[c, d], ...]: segments c/N -> d/N
    path_multiplicity              how many times the segments cover the closed path (default 1)
    C                              rational, m = C/pi^2 L(f, 2)
    f_eta                          [{"coeff", "powers"}]: f as a sum of eta quotients
    known_coeffs                   [[n, a_n], ...] printed coefficients of f
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources

import numpy as np

from .cyclotomic import CycElt
from .lvalue import lvalue_qexp
from .mahler import mahler_family
from .qseries import QExp, qexp_eta_quotient, qexp_qdq
from .quadrature import NumericResult, comparison
from .regulator import regulator_units
from .siegel import CuspPath, UnitProduct, parse_scalar, unit_factorization

__all__ = [
    "ExampleRecord",
    "load_example",
    "example_ids",
    "curve_relation_check",
    "weight2_extract",
    "eta_sum_qexp",
    "lambda_qexp",
    "lambda_product",
    "verify_example",
    "lambda_cross_check",
    "factorization_cross_check",
    "boyd_unit_identities",
]

EXAMPLE_IDS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class ExampleRecord:
    id: int
    level: int
    k: complex
    k_exact: object
    epsilon: object
    x_unit: UnitProduct
    y_unit: UnitProduct
    paths: tuple
    C: Fraction
    path_multiplicity: int = 1
    f_eta: tuple = ()
    known_coeffs: tuple = ()
    x_eta: dict | None = None
    y_eta: dict | None = None
    x_lambda: dict | None = None
    y_lambda: dict | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def example_ids() -> tuple[int, ...]:
    return EXAMPLE_IDS


def _read(name: str) -> dict:
    return json.loads(resources.files("reglab.data").joinpath(name).read_text())


def _scalar(text: str):
    z, exact = parse_scalar(text)
    return exact if exact is not None else z


def _eta_unit(spec: dict, N: int, M: int) -> QExp:
    powers = {int(d): int(r) for d, r in spec["powers"].items()}
    return qexp_eta_quotient(powers, N, M) * _scalar(spec.get("scalar", "1"))


def _factor_eta(spec: dict, N: int) -> UnitProduct:
    M = N // 2 + 40
    f = _eta_unit(spec, N, M)
    U = unit_factorization(f, N)
    if U is None:
        raise ValueError(f"eta quotient {spec} is not a product of Siegel units at level {N}")
    return U


def load_example(ex_id: int) -> ExampleRecord:
    """Read an example record; eta-quotient units are factored into Siegel units here."""
    if ex_id not in EXAMPLE_IDS:
        raise ValueError(f"unknown example {ex_id}; choose from {EXAMPLE_IDS}")
    raw = _read(f"example{ex_id}.json")
    N = raw["level"]
    k, k_exact = parse_scalar(raw["k"])
    if "x_unit" in raw:
        x = UnitProduct.parse(N, raw["x_unit"])
        y = UnitProduct.parse(N, raw["y_unit"])
    else:
        x = _factor_eta(raw["x_eta"], N)
        y = _factor_eta(raw["y_eta"], N)
    paths = tuple(CuspPath(N, c, d) for c, d in raw["paths"])
    f_eta = tuple((Fraction(t["coeff"]), {int(d): int(r) for d, r in t["powers"].items()})
                  for t in raw.get("f_eta", []))
    known = tuple((int(n), int(c)) for n, c in raw.get("known_coeffs", []))
    return ExampleRecord(ex_id, N, k, k_exact, _scalar(raw["epsilon"]), x, y, paths,
                         Fraction(raw["C"]), int(raw.get("path_multiplicity", 1)), f_eta, known, raw.get("x_eta"), raw.get("y_eta"),
                         raw.get("x_lambda"), raw.get("y_lambda"), raw)


def _embedded_max(f: QExp) -> float:
    if f.order == 0:
        return 0.0
    return float(np.max(np.abs(f.complex_coeffs())))


def curve_relation_check(ex: ExampleRecord, M: int = 200, x: UnitProduct | None = None,
                         y: UnitProduct | None = None) -> float:
    """Largest |coefficient| of k + x + 1/x + y + 1/y over its first M known terms."""
    X = (x or ex.x_unit).qexp(M + 2)
    Y = (y or ex.y_unit).qexp(M + 2)
    k = ex.k_exact if ex.k_exact is not None else ex.k
    total = X + X.inverse() + Y + Y.inverse() + k
    return _embedded_max(total.truncate(min(M, total.order)))


def _x_y_series(ex: ExampleRecord, M: int) -> tuple[QExp, QExp]:
    if ex.x_eta is not None:
        return _eta_unit(ex.x_eta, ex.level, M), _eta_unit(ex.y_eta, ex.level, M)
    return ex.x_unit.qexp(M), ex.y_unit.qexp(M)


def weight2_extract(ex: ExampleRecord, M: int = 200) -> QExp:
    """q (dx/dq) / (epsilon x (y - 1/y)), normalised to leading coefficient 1 at q^1.

    Uses the printed eta quotients when the record has them, otherwise the
    Siegel-unit products; all arithmetic is exact.
    """
    X, Y = _x_y_series(ex, M + 4)
    f = qexp_qdq(X) / ((X * (Y - Y.inverse())) * ex.epsilon)
    if f.lead != f.expdenom:
        raise ValueError(f"extracted form starts at q^{f.lead_exponent}, expected q^1")
    lead = f.coeff(0)
    if lead != 1:
        f = f / lead
    return f.truncate(min(M, f.order))


def eta_sum_qexp(terms, N: int, M: int) -> QExp:
    """sum coeff * prod_d eta(d tau)^(r_d)."""
    total = None
    for coeff, powers in terms:
        part = qexp_eta_quotient(powers, N, M) * coeff
        total = part if total is None else total + part
    if total is None:
        raise ValueError("empty eta-quotient sum")
    return total


def lambda_qexp(d: int, N: int, M: int) -> QExp:
    """lambda(d tau) = q^(d/5) prod_n (1 - q^(d n))^(n/5) with the Legendre symbol (n/5)."""
    if N % 5 or N % d:
        raise ValueError("lambda(d tau) needs 5 | N and d | N")
    coeffs = [0] * M
    coeffs[0] = 1
    for n in range(1, (M - 1) // d + 1):
        e = d * n
        r = n % 5
        if r in (1, 4):
            for j in range(M - 1, e - 1, -1):
                coeffs[j] -= coeffs[j - e]
        elif r in (2, 3):
            for j in range(e, M):
                coeffs[j] += coeffs[j - e]
    num = np.array(coeffs, dtype=object).reshape(M, 1)
    return QExp._exact(N, d * 24 * N // 5, 1, num, 1)


def lambda_product(spec: dict, N: int, M: int) -> QExp:
    """scalar * prod_d lambda(d tau)^(r_d)."""
    out = QExp.monomial(N, 0)
    for d, r in sorted(spec["powers"].items(), key=lambda kv: int(kv[0])):
        lam = lambda_qexp(int(d), N, M)
        out = out * (lam ** int(r))
    return out * _scalar(spec.get("scalar", "1"))


def lambda_cross_check(ex: ExampleRecord, M: int = 200) -> bool | None:
    """x and y as printed lambda products agree exactly with their Siegel-unit forms (None if absent)."""
    if ex.x_lambda is None:
        return None
    N = ex.level
    ok = True
    for spec, unit in ((ex.x_lambda, ex.x_unit), (ex.y_lambda, ex.y_unit)):
        ok &= _exact_equal(lambda_product(spec, N, M), unit.qexp(M), M)
    return bool(ok)


def factorization_cross_check(ex: ExampleRecord, M: int = 200) -> bool | None:
    """For eta-quotient records, the weight-2 form from the eta quotients equals the one from
    their Siegel-unit factorisation (None if the record has no eta quotients)."""
    if ex.x_eta is None:
        return None
    via_units = replace(ex, x_eta=None, y_eta=None)
    return _exact_equal(weight2_extract(ex, M), weight2_extract(via_units, M), M)


def _integer_coeffs(f: QExp, count: int) -> list[int]:
    vals = f.complex_coeffs()[:count]
    ints = np.rint(vals.real).astype(int)
    if np.max(np.abs(vals - ints)) > 1e-9:
        raise ValueError("coefficients are not integers")
    return [int(v) for v in ints]


def _exact_equal(f: QExp, g: QExp, M: int) -> bool:
    n = min(M, f.order, g.order)
    return f.lead == g.lead and (f.truncate(n) - g.truncate(n)).order == 0


def _lvalue_form(ex: ExampleRecord, tol: float) -> tuple[QExp, str]:
    """The q-expansion used for L(f, 2): the eta formula when printed, else the extraction."""
    from .lvalue import default_cutoff

    eps = default_cutoff(ex.level, tol)
    need = int((math.log(1 / tol) + 10) / (2 * math.pi * eps)) + 10
    if ex.f_eta:
        return eta_sum_qexp(ex.f_eta, ex.level, need), "eta"
    return weight2_extract(ex, need), "extracted"


def verify_example(ex: ExampleRecord, tol: float = 1e-5, M: int = 200) -> dict:
    """Three-way check m(quadrature) vs regulator/(2 pi) vs (C/pi^2) L(f, 2), plus the series checks.

    The regulator over the recorded segments is divided by the record's
    path multiplicity; the raw per-segment values are kept in the report.
    """
    report: dict = {"id": ex.id, "level": ex.level, "k": [ex.k.real, ex.k.imag],
                    "x": str(ex.x_unit), "y": str(ex.y_unit),
                    "paths": [str(p) for p in ex.paths], "C_over_pi2": str(ex.C)}
    try:
        report["curve_residual"] = curve_relation_check(ex, M)
    except Exception as exc:
        raise RuntimeError(f"example {ex.id}: curve check failed: {exc}") from exc
    checks = {"curve": report["curve_residual"] < 1e-9}
    try:
        f = weight2_extract(ex, M)
    except Exception as exc:
        raise RuntimeError(f"example {ex.id}: weight-2 extraction failed: {exc}") from exc
    w2: dict = {"constant_term_zero": f.lead >= f.expdenom}
    if ex.f_eta:
        g = eta_sum_qexp(ex.f_eta, ex.level, M)
        w2["matches_eta_formula"] = _exact_equal(f, g, M - 1)
    if ex.known_coeffs:
        top = max(n for n, _ in ex.known_coeffs)
        got = _integer_coeffs(f, top)
        w2["matches_printed"] = got == [c for _, c in sorted(ex.known_coeffs)]
    lam = lambda_cross_check(ex, M)
    if lam is not None:
        w2["lambda_products_match_units"] = lam
    fac = factorization_cross_check(ex, M)
    if fac is not None:
        w2["eta_and_unit_forms_agree"] = fac
    report["weight2"] = w2
    checks.update({k: bool(v) for k, v in w2.items()})

    reg_parts = [regulator_units(ex.x_unit, ex.y_unit, p, tol=tol * 1e-3) for p in ex.paths]
    raw_reg = math.fsum(r.value for r in reg_parts) / (2 * math.pi)
    report["regulator_segments_over_2pi"] = [r.value / (2 * math.pi) for r in reg_parts]
    report["path_multiplicity"] = ex.path_multiplicity
    mult = ex.path_multiplicity
    reg = NumericResult(raw_reg / mult,
                        math.fsum(r.errbound for r in reg_parts) / (2 * math.pi * mult),
                        {"pairs": sum(r.work.get("pairs", 0) for r in reg_parts)},
                        all(r.converged for r in reg_parts))
    mq = mahler_family(ex.k, tol * 1e-3)
    form, source = _lvalue_form(ex, tol * 1e-3)
    L = lvalue_qexp(form, 2, tol * 1e-3)
    scale = float(ex.C) / math.pi**2
    CL = NumericResult(scale * float(np.real(L.value)), scale * L.errbound, L.work, L.converged)
    report["lvalue_source"] = source
    report["outputs"] = {
        "m_quadrature": mq.to_json(),
        "regulator_over_2pi": reg.to_json(),
        "C_L": CL.to_json(),
        "L_f_2": L.to_json(),
    }
    comps = [
        comparison("m_quadrature", mq, "regulator_over_2pi", reg, tol),
        comparison("m_quadrature", mq, "C_L", CL, tol),
        comparison("regulator_over_2pi", reg, "C_L", CL, tol),
    ]
    report["comparisons"] = comps
    report["checks"] = checks
    report["pass"] = all(c["pass"] for c in comps) and all(checks.values())
    return report


def boyd_unit_identities(M: int = 200) -> dict:
    """Residual orders of the level-15 unit identities attached to (1 + x)(1 + y) - z.

    Returns, per identity, whether the two sides agree through q^M exactly,
    together with the leading exponents of X and Y.
    """
    raw = _read("boyd15.json")
    N = raw["level"]
    U = lambda s: UnitProduct.parse(N, s).qexp(M + 4)  # noqa: E731
    X, Y = U(raw["X"]), U(raw["Y"])
    out = {
        "lead_X": X.lead_exponent == raw["lead_X"] and X.coeff(0) == 1,
        "lead_Y": Y.lead_exponent == raw["lead_Y"] and Y.coeff(0) == 1,
        "one_minus_X": _agrees_through(1 - X, U(raw["one_minus_X"]), M),
        "one_minus_Y": _agrees_through(1 - Y, U(raw["one_minus_Y"]), M),
    }
    return out


def _agrees_through(f: QExp, g: QExp, M: int) -> bool:
    """f - g = O(q^(M+1)) exactly, with both series known that far."""
    diff = f - g
    D = diff.expdenom
    known = diff.precision
    if known < (M + 1) * D:
        raise ValueError("series not known far enough")
    return diff.order == 0 or diff.lead > M * D

