"""``moi`` command-line front end.

Every subcommand prints one JSON document on standard output.  Exit codes:
0 on success, 1 for domain errors (``{"error": code, "message": ...}``),
2 for malformed input or unreadable files (same error shape).
Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import calculus as calc
from .decomp import ipd_reconstruct
from .errors import MOIError
from .io import (
    MalformedInput,
    builtin_ipd,
    dumps,
    ipd_from_json,
    loads,
    matrix_from_json,
    matrix_to_json,
    pvm_from_json,
)
from .moi import MOIProblem, moi_ipd, moi_spectral
from .numkit import TraceFunctional, eig_hermitian, fro, lp_norm, schatten_norm
from .pavlov import pavlov_build, pavlov_integrate, semivariation_bounds
from .pvm import pvm_from_spectral
from .verify import DEFAULT_SEED, DEFAULT_SIZE, SUITES, run_suite


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise MalformedInput(message)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None


def _load_pvm(path: str):
    """A PVM object, or a Hermitian matrix whose spectral measure is used."""
    obj = _read_json(path)
    if isinstance(obj, dict) and "atoms" in obj:
        return pvm_from_json(obj)
    return pvm_from_spectral(eig_hermitian(matrix_from_json(obj)))


def _parse_p(text: str) -> float:
    if text.lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise MalformedInput(f"exponent must be a number or 'inf', got {text!r}") from None


def _csv(text: str, kind=float) -> list:
    try:
        return [kind(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise MalformedInput(f"expected a comma-separated list, got {text!r}") from None


def _table_from_json(obj) -> np.ndarray:
    try:
        shape = [int(s) for s in obj["shape"]]
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"table object needs shape and data: {exc}") from None
    flat = matrix_from_json({"rows": 1, "cols": len(data), "data": data}) if data else None
    if flat is None or flat.size != math.prod(shape):
        raise MalformedInput(f"table data does not match shape {shape}")
    return flat.reshape(shape)


def _problem(args) -> MOIProblem:
    Ps = [_load_pvm(p) for p in args.pvm]
    bs = [matrix_from_json(_read_json(b)) for b in args.b]
    return MOIProblem(Ps, bs)


def _symbol(args, prob: MOIProblem):
    """``(table, ipd)`` for the requested symbol; either may be None."""
    table = ipd = None
    if args.target:
        table = _table_from_json(_read_json(args.target))
    if args.ipd:
        if os.path.exists(args.ipd) or args.ipd.endswith(".json"):
            ipd = ipd_from_json(_read_json(args.ipd))
        else:
            ipd = builtin_ipd(args.ipd, prob.k)
            if table is None:
                table = _exact_table(args.ipd, prob)
        if table is None:
            table = ipd_reconstruct(ipd, prob.pvms)
    return table, ipd


def _exact_table(spec: str, prob: MOIProblem) -> np.ndarray:
    """Divided-difference table computed directly, independent of the decomposition."""
    parts = spec.split(":")
    f = calc.ScalarFunction.power(int(parts[1])) if parts[0] == "monomial" \
        else calc.ScalarFunction.exp(float(parts[1]))
    return calc.dd_table(f, [P.values for P in prob.pvms])


def cmd_eval(args) -> dict:
    prob = _problem(args)
    table, ipd = _symbol(args, prob)
    if table is None:
        raise MalformedInput("eval needs --ipd or --target")
    if args.engine in ("ipd", "both") and ipd is None:
        raise MalformedInput(f"engine {args.engine!r} needs --ipd")
    out = {"engine": args.engine, "scale": prob.scale(table)}
    if args.engine == "spectral":
        out["result"] = matrix_to_json(moi_spectral(prob, table))
    elif args.engine == "ipd":
        out["result"] = matrix_to_json(moi_ipd(prob, ipd))
    else:
        a, b = moi_spectral(prob, table), moi_ipd(prob, ipd)
        out["result"] = matrix_to_json(a)
        out["gap"] = fro(a - b)
    return out


def cmd_derivative(args) -> dict:
    f = calc.ScalarFunction.parse(args.f)
    A = matrix_from_json(_read_json(args.A))
    B = matrix_from_json(_read_json(args.B))
    d = calc.frechet_derivative(f, A, B, args.order)
    out = {"order": args.order, "result": matrix_to_json(d)}
    if 1 <= args.order <= 4:
        fd = calc.finite_difference(f, A, B, args.order, args.h)
        out["fdResidual"] = fro(d - fd) / (1.0 + fro(d))
    return out


def cmd_norms(args) -> dict:
    a = matrix_from_json(_read_json(args.matrix))
    p = _parse_p(args.p)
    if args.blocks is None:
        if args.weights is not None:
            raise MalformedInput("--weights needs --blocks")
        return {"value": schatten_norm(a, p)}
    blocks = _csv(args.blocks, int)
    weights = _csv(args.weights) if args.weights else [1.0] * len(blocks)
    return {"value": lp_norm(a, TraceFunctional(tuple(blocks), tuple(weights)), p)}


def cmd_pavlov(args) -> dict:
    prob = _problem(args)
    table, _ = _symbol(args, prob)
    if table is None:
        table = np.ones([len(P) for P in prob.pvms])
    vm = pavlov_build(prob)
    got = pavlov_integrate(vm, table)
    if not args.check:
        return {"result": matrix_to_json(got)}
    lower, upper = semivariation_bounds(vm, prob.b, args.samples, args.seed)
    return {"upperSvar": upper, "lowerSvar": lower,
            "agreementGap": fro(got - moi_spectral(prob, table))}


def cmd_check(args):
    seed = args.seed
    if seed is None:
        env = os.environ.get("MOI_SEED")
        try:
            seed = int(env) if env else DEFAULT_SEED
        except ValueError:
            raise MalformedInput(f"MOI_SEED must be an integer, got {env!r}") from None
    names = args.suite or list(SUITES)
    reports = [run_suite(n, seed, args.size) for n in names]
    for r in reports:
        print(f"{r.suite_name}: {'pass' if r.passed else 'FAIL'} "
              f"({r.cases} cases, max residual {r.max_residual:.3e} <= {r.tolerance:.0e})",
              file=sys.stderr)
    payload = [r.as_dict() for r in reports]
    if not args.json:
        payload = {"passed": all(r.passed for r in reports),
                   "suites": {r.suite_name: r.passed for r in reports}}
    return payload, (0 if all(r.passed for r in reports) else 1)


def cmd_dd(args) -> dict:
    f = calc.ScalarFunction.parse(args.f)
    nodes = _csv(args.nodes)
    if not nodes:
        raise MalformedInput("--nodes needs at least one value")
    z = calc.divided_difference(f, nodes)
    return {"value": [z.real, z.imag]}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="moi", description="Multiple operator integrals on finite spectra.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def symbol_flags(p):
        p.add_argument("--pvm", action="append", required=True,
                       help="PVM JSON or Hermitian matrix JSON (repeat k+1 times)")
        p.add_argument("--b", action="append", default=[], help="operator JSON (repeat k times)")
        p.add_argument("--ipd", help="decomposition JSON file or builtin monomial:n / exp:t:nodes")
        p.add_argument("--target", help="symbol table JSON {shape, data}")

    p = sub.add_parser("eval", help="evaluate a multiple operator integral")
    symbol_flags(p)
    p.add_argument("--engine", choices=("spectral", "ipd", "both"), default="spectral")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("derivative", help="Frechet derivative of a matrix function")
    p.add_argument("--f", required=True, help="power:n, exp:t or poly:c0,c1,...")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--h", type=float, default=1e-4, help="finite-difference step")
    p.set_defaults(func=cmd_derivative)

    p = sub.add_parser("norms", help="Schatten or block-trace L^p norm")
    p.add_argument("--p", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--blocks", help="comma-separated block sizes")
    p.add_argument("--weights", help="comma-separated block weights")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("pavlov", help="Pavlov vector measure integral and semivariation")
    symbol_flags(p)
    p.add_argument("--check", action="store_true")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_pavlov)

    p = sub.add_parser("check", help="run the seeded property suites")
    p.add_argument("--suite", action="append", choices=list(SUITES))
    p.add_argument("--seed", type=int)
    p.add_argument("--size", type=int, default=DEFAULT_SIZE)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dd", help="divided difference of a builtin function")
    p.add_argument("--f", required=True)
    p.add_argument("--nodes", required=True, help="comma-separated nodes")
    p.set_defaults(func=cmd_dd)
    return parser


def _fail(code: str, message: str, status: int) -> int:
    print(f"moi: {message}", file=sys.stderr)
    print(dumps({"error": code, "message": message}))
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
        status = 0
        if isinstance(result, tuple):
            result, status = result
        text = dumps(result)
    except MalformedInput as exc:
        return _fail(exc.code, str(exc), 2)
    except MOIError as exc:
        return _fail(exc.code, str(exc), 1)
    except (ValueError, TypeError) as exc:
        return _fail("MalformedInput", str(exc), 2)
    print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
