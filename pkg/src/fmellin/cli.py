"""fmellin command line.

Usage:
    fmellin gamma --kind lower --s 1 --t 1
    fmellin eval --family geometric --k 5 --s 0.5 --t 100 --method substitution_geo
    fmellin verify --suite paper --out report.json
    fmellin sweep --family binomial --k 2 --s 1 --t-grid 0.25:0.5:2:lin
    fmellin list-families

Exit codes: 0 success, 1 invalid arguments, 2 numerical failure (pole,
non-convergence, divergence), 3 verification suite with failing cases.
"""

import argparse
import io
import json
import math
import sys

import numpy as np

from . import gammakit
from .errors import DomainError, NumericalError
from .mellin_engine import METHODS, MellinQuery, evaluate
from .quadrature import QuadratureConfig
from .series_kernel import FAMILIES, SeriesEvalConfig, make_family
from .verify_harness import (
    report_json,
    run_paper_suite,
    sweep_parameter,
    write_sweep_csv,
    _atomic_write,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_FAILED = 0, 1, 2, 3
SUITES = ("paper",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _number(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _grid(text):
    try:
        start, stop, count, scale = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"grid must be start:stop:count:lin|log, got {text!r}") from None
    if count < 1 or scale not in ("lin", "log"):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise argparse.ArgumentTypeError("log grids need positive endpoints")
        return [float(v) for v in np.geomspace(start, stop, count)]
    return [float(v) for v in np.linspace(start, stop, count)]


def _fmt(v):
    return f"{v:.9g}"


def _emit(text, out):
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _configs(args):
    quad = QuadratureConfig(rel_tol=args.tol) if args.tol else QuadratureConfig()
    series = SeriesEvalConfig(max_terms=args.max_terms) if args.max_terms else SeriesEvalConfig()
    return quad, series


def cmd_gamma(args):
    if args.kind in ("lower", "upper") and args.t is None:
        raise UsageError(f"--kind {args.kind} requires --t")
    fn = {
        "gamma": lambda: gammakit.gamma(args.s),
        "log": lambda: gammakit.log_gamma(args.s),
        "lower": lambda: gammakit.lower_inc_gamma(args.s, args.t),
        "upper": lambda: gammakit.upper_inc_gamma(args.s, args.t),
    }[args.kind]
    value = fn()
    if args.format == "json":
        params = {"s": args.s} if args.t is None else {"s": args.s, "t": args.t}
        text = json.dumps({"params": params, "values": {args.kind: value}}) + "\n"
    else:
        text = _fmt(value) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _query(args, spec):
    t = args.t
    u = args.u or 0.0
    if args.method == "theorem2":
        return MellinQuery(spec, args.s, upper=math.inf, lower=t, method="theorem2")
    if args.method == "classical":
        return MellinQuery(spec, args.s, upper=math.inf, method="classical")
    return MellinQuery(spec, args.s, upper=t, lower=u, method=args.method)


def cmd_eval(args):
    spec = make_family(args.family, k=args.k, mu=args.mu)
    if args.t is None and args.method != "classical":
        raise UsageError(f"--method {args.method} requires --t")
    if args.method == "theorem2" and math.isinf(args.t):
        raise UsageError("theorem2 needs a finite --t")
    query = _query(args, spec)
    quad, series = _configs(args)
    result = evaluate(query, series, quad)
    if args.format == "json":
        params = {"family": spec.family_id, "s": args.s}
        if args.t is not None:
            params["t"] = args.t if math.isfinite(args.t) else "inf"
        if args.u:
            params["u"] = args.u
        params.update(spec.params)
        text = json.dumps({
            "params": params,
            "values": {result.method: result.value},
            "est_error": result.est_error,
            "evals": result.evals,
            "flags": sorted(result.flags),
        }) + "\n"
    else:
        text = _fmt(result.value) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args):
    quad, series = _configs(args)
    report = run_paper_suite(quad, series)
    if args.format == "json" or args.out:
        text = report_json(report)
    else:
        lines = [f"{'PASS' if r['pass'] else 'FAIL'} {r['id']}  rel_err={r['rel_err']}"
                 for r in report["cases"]]
        s = report["summary"]
        lines.append(f"{s['n_pass']} passed, {s['n_fail']} failed, "
                     f"max rel_err {s['max_rel_err']}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if report["summary"]["n_fail"] == 0 else EXIT_FAILED


def cmd_sweep(args):
    spec = make_family(args.family, k=args.k, mu=args.mu)
    if (args.t_grid is None) == (args.s_grid is None):
        raise UsageError("sweep needs exactly one of --t-grid or --s-grid")
    quad, series = _configs(args)
    if args.t_grid is not None:
        if args.s is None:
            raise UsageError("--t-grid requires --s")
        rows = sweep_parameter(spec, "t", args.t_grid, s=args.s, method=args.method,
                               quad_cfg=quad, series_cfg=series)
    else:
        if args.t is None:
            raise UsageError("--s-grid requires --t")
        rows = sweep_parameter(spec, "s", args.s_grid, t=args.t, method=args.method,
                               quad_cfg=quad, series_cfg=series)
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        write_sweep_csv(rows, buf)
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def cmd_list_families(args):
    rows = []
    for name, cls in FAMILIES.items():
        params = {"geometric": "--k (default 1)", "binomial": "--k", "catalan": "--mu"}
        rows.append(f"{name:12s} radius={cls.radius:g}  {params.get(name, '')}".rstrip())
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="fmellin", description="Finite Mellin transforms via incomplete gamma")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, formats=("text", "json")):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--out", metavar="PATH")

    def family(p):
        p.add_argument("--family", required=True, choices=list(FAMILIES))
        p.add_argument("--k", type=_number)
        p.add_argument("--mu", type=int)

    def numerics(p):
        p.add_argument("--tol", type=_number, help="quadrature relative tolerance")
        p.add_argument("--max-terms", type=int, help="series term cap")

    p = sub.add_parser("gamma", help="gamma and incomplete gamma values")
    p.add_argument("--kind", choices=("gamma", "log", "lower", "upper"), default="gamma")
    p.add_argument("--s", type=_number, required=True)
    p.add_argument("--t", type=_number)
    common(p)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("eval", help="evaluate one Mellin transform")
    family(p)
    p.add_argument("--s", type=_number, required=True)
    p.add_argument("--t", type=_number)
    p.add_argument("--u", type=_number)
    p.add_argument("--method", choices=METHODS, default="theorem1")
    numerics(p)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, default="paper")
    numerics(p)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="residual table along t or s")
    family(p)
    p.add_argument("--s", type=_number)
    p.add_argument("--t", type=_number)
    p.add_argument("--t-grid", type=_grid)
    p.add_argument("--s-grid", type=_grid)
    p.add_argument("--method", choices=METHODS, default="theorem1")
    numerics(p)
    common(p, formats=("csv", "json"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("list-families", help="list the series families")
    common(p)
    p.set_defaults(func=cmd_list_families)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return args.func(args)
    except UsageError as exc:
        print(f"fmellin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"fmellin: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"fmellin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fmellin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
