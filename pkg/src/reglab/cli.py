"""Command-line interface: ``reglab <command> ...``.

Every command prints a short text summary, or with ``--json`` a
deterministic JSON report (sorted keys, no timings). Exit status is 0 when
all comparisons pass, 1 when one fails and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__
from .eisenstein import parse_combo, weight2_combo
from .examples import load_example, verify_example
from .lvalue import lvalue_combo, lvalue_partial_sum, lvalue_qexp
from .mahler import LaurentPoly2, mahler_2var, mahler_3var_boyd, mahler_family
from .qseries import QExp, qexp_eta_quotient
from .quadrature import NumericResult, comparison
from .regulator import check_admissible, regulator_pair, regulator_units
from .siegel import CuspPath, UnitProduct, unit_factorization

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InvalidInput(ValueError):
    pass


def _report(command: str, inputs: dict, outputs: dict, comparisons: list | None = None,
            extra: dict | None = None) -> dict:
    comparisons = comparisons or []
    rep = {"command": command, "version": __version__, "inputs": inputs,
           "outputs": {k: (v.to_json() if isinstance(v, NumericResult) else v) for k, v in outputs.items()},
           "comparisons": comparisons,
           "pass": all(c["pass"] for c in comparisons)}
    if extra:
        rep.update(extra)
    return rep


def _parse_k(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(parts[0].replace("i", "j")) if "i" in parts[0] else complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InvalidInput(f"cannot parse k = {text!r}; use 're' or 're,im'")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read JSON from {path}: {exc}") from exc


# -- commands -----------------------------------------------------------

def cmd_verify_theorem(args) -> dict:
    N, a, b, c = args.level, args.a, args.b, args.c
    try:
        check_admissible(a, b, c, N)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    lhs = regulator_pair(a, b, c, N, tol=args.tol * 1e-2 / (4 * math.pi))
    lhs4 = NumericResult(4 * math.pi * lhs.value, 4 * math.pi * lhs.errbound, lhs.work, lhs.converged)
    rhs = lvalue_combo(weight2_combo([(a, b, c)], N, M=0), tol=args.tol * 1e-2)
    rhs_re = NumericResult(float(rhs.value.real if isinstance(rhs.value, complex) else rhs.value),
                           rhs.errbound, rhs.work, rhs.converged)
    imag = abs(complex(rhs.value).imag)
    tol = args.tol * max(1.0, abs(rhs_re.value))
    comp = comparison("4pi_regulator", lhs4, "L_combo", rhs_re, tol)
    return _report("verify-theorem", {"level": N, "a": a, "b": b, "c": c, "tol": args.tol},
                   {"4pi_regulator": lhs4, "L_combo": rhs_re, "L_combo_imag": imag}, [comp])


def cmd_example(args) -> dict:
    try:
        ex = load_example(args.id)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    tol = args.tol if args.tol is not None else (1e-5 if args.id in (1, 3, 4) else 1e-4)
    rep = verify_example(ex, tol)
    outputs = rep.pop("outputs")
    comps = rep.pop("comparisons")
    checks = {k: bool(v) for k, v in rep.pop("checks").items()}
    rep.pop("pass")
    out = _report("example", {"id": args.id, "tol": tol}, outputs, comps, {"example": rep, "checks": checks})
    out["pass"] = out["pass"] and all(checks.values())
    return out


def cmd_mahler(args) -> dict:
    if args.poly:
        P = LaurentPoly2.from_json(_load_json(args.poly))
        res = mahler_2var(P, args.tol)
        return _report("mahler", {"poly": P.to_json(), "tol": args.tol}, {"m": res})
    if args.k is None:
        raise InvalidInput("give --k or --poly")
    k = _parse_k(args.k)
    res = mahler_family(k, args.tol)
    outputs = {"m": res}
    comps = []
    if args.check_2var:
        other = mahler_2var(LaurentPoly2.family(k), max(args.tol, 1e-9))
        outputs["m_2var"] = other
        comps.append(comparison("m", res, "m_2var", other, args.tol))
    return _report("mahler", {"k": [k.real, k.imag], "tol": args.tol}, outputs, comps)


def cmd_mahler3(args) -> dict:
    res = mahler_3var_boyd(args.tol)
    outputs = {"m": res}
    comps = []
    if args.compare:
        f = qexp_eta_quotient({1: 1, 3: 1, 5: 1, 15: 1}, 15, args.terms + 1)
        partial, tail = lvalue_partial_sum(f, 3, args.terms)
        L = NumericResult(partial, tail, {"terms": args.terms})
        scale = 225 / (4 * math.pi**4)
        rhs = NumericResult(scale * partial, scale * tail, {"terms": args.terms})
        outputs["L_f15_3"] = L
        outputs["225_L_over_4pi4"] = rhs
        comps.append(comparison("m", res, "225_L_over_4pi4", rhs, 1e-3))
    return _report("mahler3", {"tol": args.tol}, outputs, comps)


def cmd_lvalue(args) -> dict:
    if args.combo:
        if args.level is None:
            raise InvalidInput("--combo needs --level")
        try:
            combo = weight2_combo(parse_combo(args.combo), args.level, M=0)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from exc
        if args.s != 2:
            raise InvalidInput("combinations are evaluated at s = 2 only")
        res = lvalue_combo(combo, args.tol)
        return _report("lvalue", {"combo": args.combo, "level": args.level, "s": 2}, {"L": res})
    if args.qexp:
        f = QExp.from_json(_load_json(args.qexp))
        try:
            res = lvalue_qexp(f, args.s, args.tol)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from exc
        return _report("lvalue", {"qexp": args.qexp, "s": args.s}, {"L": res})
    raise InvalidInput("give --combo or --qexp")


def cmd_regulator(args) -> dict:
    N = args.level
    try:
        U = UnitProduct.parse(N, args.u)
        V = UnitProduct.parse(N, args.v)
        path = CuspPath(N, args.start, args.end)
        for c in path.cusps:
            for a in U.exponents:
                for b in V.exponents:
                    check_admissible(a, b, c, N)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    res = regulator_units(U, V, path, args.tol)
    over = NumericResult(res.value / (2 * math.pi), res.errbound / (2 * math.pi), res.work, res.converged)
    return _report("regulator", {"level": N, "u": str(U), "v": str(V), "path": str(path)},
                   {"regulator": res, "regulator_over_2pi": over})


def cmd_factor_unit(args) -> dict:
    f = QExp.from_json(_load_json(args.qexp))
    try:
        U = unit_factorization(f, args.level)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    found = U is not None
    out = {"found": found}
    if found:
        out["unit"] = U.to_json()
        out["unit_str"] = str(U)
    return _report("factor-unit", {"level": args.level, "qexp": args.qexp}, out,
                   [], {"pass": found})


# -- parser -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reglab", description="Regulators of modular units, "
                                "Eisenstein L-values and Mahler measures.")
    p.add_argument("--version", action="version", version=f"reglab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print a JSON report")

    sp = sub.add_parser("verify-theorem", help="compare 4 pi int eta(g_a, g_b) with L(f_{a,b;c}, 2)")
    sp.add_argument("--level", "-N", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-6)
    common(sp)
    sp.set_defaults(func=cmd_verify_theorem)

    sp = sub.add_parser("example", help="three-way check of a curated example")
    sp.add_argument("--id", type=int, required=True)
    sp.add_argument("--tol", type=float, default=None)
    common(sp)
    sp.set_defaults(func=cmd_example)

    sp = sub.add_parser("mahler", help="m(k + x + 1/x + y + 1/y), or of a polynomial from JSON")
    sp.add_argument("--k", help="k as 're' or 're,im' (also '2i')")
    sp.add_argument("--poly", help="LaurentPoly2 JSON file")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--check-2var", action="store_true", help="also run the general two-variable route")
    common(sp)
    sp.set_defaults(func=cmd_mahler)

    sp = sub.add_parser("mahler3", help="m((1 + x)(1 + y) - z)")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--compare", action="store_true", help="compare with 225/(4 pi^4) L(f15, 3)")
    sp.add_argument("--terms", type=int, default=100_000, help="partial-sum length for L(f15, 3)")
    common(sp)
    sp.set_defaults(func=cmd_mahler3)

    sp = sub.add_parser("lvalue", help="L-value of an Eisenstein combination or a stored q-expansion")
    sp.add_argument("--combo", help='"a,b,c:lambda;..."')
    sp.add_argument("--level", "-N", type=int)
    sp.add_argument("--qexp", help="QExp JSON file")
    sp.add_argument("--s", type=int, default=2, choices=(2, 3))
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp)
    sp.set_defaults(func=cmd_lvalue)

    sp = sub.add_parser("regulator", help="int eta(U, V) from c/N to i oo, or from c/N to d/N")
    sp.add_argument("--level", "-N", type=int, required=True)
    sp.add_argument("--u", required=True, help='unit spec "a:n,...[@scalar]"')
    sp.add_argument("--v", required=True)
    sp.add_argument("--from", dest="start", type=int, required=True)
    sp.add_argument("--to", dest="end", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp)
    sp.set_defaults(func=cmd_regulator)

    sp = sub.add_parser("factor-unit", help="write a stored q-expansion as a product of Siegel units")
    sp.add_argument("--level", "-N", type=int, required=True)
    sp.add_argument("--qexp", required=True, help="QExp JSON file")
    common(sp)
    sp.set_defaults(func=cmd_factor_unit)
    return p


def _text(rep: dict) -> str:
    lines = [f"{rep['command']}  (reglab {rep['version']})"]
    for name, val in rep["outputs"].items():
        if isinstance(val, dict) and "value" in val:
            lines.append(f"  {name:<22} {val['value']!s:<26} +- {val['errbound']:.2e}")
        else:
            lines.append(f"  {name:<22} {val}")
    for c in rep["comparisons"]:
        verdict = "PASS" if c["pass"] else "FAIL"
        lines.append(f"  {verdict}  |{c['lhs']} - {c['rhs']}| = {c['absdiff']:.3e}  (tol {c['tol']:.1e})")
    if "checks" in rep:
        for k, v in rep["checks"].items():
            lines.append(f"  {'PASS' if v else 'FAIL'}  {k}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        rep = args.func(args)
    except InvalidInput as exc:
        print(f"reglab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.json:
        print(json.dumps(rep, sort_keys=True, indent=2))
    else:
        print(_text(rep))
        sys.stdout.flush()
        print(f"  ({time.perf_counter() - start:.2f} s)", file=sys.stderr)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
