"""Command-line front end.

Subcommands:

    expand      print exact q-expansions of the moduli series and Y, F
    invariants  print the closed or open instanton table
    verify      run the symbolic verification suites (PASS/FAIL lines)

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
Expansion bundles can be cached (``--cache-dir`` or the
OPENQUINTIC_CACHE_DIR environment variable); a cache holding a higher
order than requested is served as a truncated view without recompute.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import gmconn, modsolver, perioddom
from .modsolver import (
    DEFAULT_EPSILON,
    CacheFormatError,
    SolutionBundle,
    bundle_from_text,
    bundle_to_text,
)
from .numfield import qr_print
from .report import ReportLine, render_report
from .series import PuiseuxSeries
from .symca import MODULI_VARS

DEFAULT_ORDER = 60  # highest retained x-exponent; covers q^6

EXPAND_VARS = list(MODULI_VARS) + ["Y", "F"]


class CLIError(Exception):
    """Usage or input problem; maps to exit code 2."""


def _cache_dir(args) -> str | None:
    if args.cache_dir:
        return args.cache_dir
    return os.environ.get("OPENQUINTIC_CACHE_DIR")


def _cache_path(directory: str, epsilon: int) -> str:
    sign = "p1" if epsilon == 1 else "m1"
    return os.path.join(directory, f"bundle_eps_{sign}.txt")


def _load_bundle(order: int, epsilon: int, directory: str | None) -> SolutionBundle:
    """Solve to the requested order, via the cache when possible."""
    n = order + 1
    if directory is None:
        return modsolver.solve(n, epsilon)
    path = _cache_path(directory, epsilon)
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            try:
                cached = bundle_from_text(fh.read())
            except CacheFormatError as exc:
                raise CLIError(f"cache file {path}: {exc}") from exc
        if cached.epsilon == epsilon and cached.n >= n:
            return modsolver.truncate_bundle(cached, n)
    bundle = modsolver.solve(n, epsilon)
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(bundle_to_text(bundle))
    return bundle


def _expand_series(bundle: SolutionBundle, var: str) -> PuiseuxSeries:
    if var == "Y":
        return bundle.y
    if var == "F":
        return bundle.f
    return bundle.series[var]


def _series_json(f: PuiseuxSeries) -> dict:
    return {
        "ram": f.ram,
        "trunc": f.trunc,
        "terms": [
            {
                "exp": f"{m}/{f.ram}",
                "coeff": {"rat": str(c.rat), "irr": str(c.irr)},
            }
            for m, c in sorted(f.coeffs.items())
        ],
    }


def cmd_expand(args) -> int:
    names = [v.strip() for v in args.vars.split(",") if v.strip()]
    for v in names:
        if v not in EXPAND_VARS:
            raise CLIError(f"unknown variable {v!r}; choose from "
                           + ",".join(EXPAND_VARS))
    if args.order < 0:
        raise CLIError("--order must be non-negative")
    bundle = _load_bundle(args.order, args.epsilon, _cache_dir(args))
    if args.format == "json":
        payload = {
            "order": args.order,
            "epsilon": bundle.epsilon,
            "vars": {v: _series_json(_expand_series(bundle, v)) for v in names},
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    for v in names:
        f = _expand_series(bundle, v)
        print(f"# {v}")
        print(f"ram={f.ram} trunc={f.trunc}")
        for m in f.support():
            print(f"{m}\t{qr_print(f.coeffs[m])}")
    return 0


def cmd_invariants(args) -> int:
    if args.max_degree < 1:
        raise CLIError("--max-degree must be at least 1")
    order = args.order if args.order is not None else DEFAULT_ORDER
    bundle = _load_bundle(order, args.epsilon, _cache_dir(args))
    try:
        table = modsolver.invariants(bundle, args.sector, args.max_degree)
    except modsolver.PrecisionError as exc:
        raise CLIError(str(exc)) from exc
    if args.format == "json":
        payload = {
            "sector": table.sector,
            "entries": {str(d): str(v) for d, v in sorted(table.entries.items())},
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    for d, v in sorted(table.entries.items()):
        print(f"{d}\t{v}")
    return 0


SUITES = ("gm", "vf", "pf", "group", "tau", "all")


def run_suite(name: str) -> list[ReportLine]:
    if name == "gm":
        return gmconn.verify_connection()
    if name == "vf":
        return gmconn.verify_vector_field()
    if name == "pf":
        return modsolver.verify_pfih()
    if name == "group":
        lines = perioddom.verify_group_relations()
        lines += perioddom.verify_action_derivation()
        return lines
    if name == "tau":
        return perioddom.verify_tau_formulas()
    raise CLIError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    names = list(SUITES[:-1]) if args.suite == "all" else [args.suite]
    lines: list[ReportLine] = []
    for name in names:
        lines.extend(run_suite(name))
    if args.suite == "all":
        lines.extend(modsolver.verify_solution())
    print(render_report(lines))
    return 0 if all(line.ok for line in lines) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openquintic",
        description="Exact expansions, instanton numbers and symbolic "
                    "verification for the open mirror quintic moduli space.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--epsilon", type=int, choices=(-1, 1),
                       default=DEFAULT_EPSILON,
                       help="orientation sign on the inhomogeneity "
                            "(default %(default)s, the +30 q^(1/2) calibration)")
        p.add_argument("--cache-dir", default=None,
                       help="bundle cache directory (or OPENQUINTIC_CACHE_DIR)")

    p_exp = sub.add_parser("expand", help="print exact q-expansions")
    p_exp.add_argument("--order", type=int, default=DEFAULT_ORDER,
                       help="highest kept exponent of q^(1/10) (default %(default)s)")
    p_exp.add_argument("--vars", default=",".join(EXPAND_VARS),
                       help="comma-separated subset of " + ",".join(EXPAND_VARS))
    p_exp.add_argument("--format", choices=("text", "json"), default="text")
    common(p_exp)
    p_exp.set_defaults(func=cmd_expand)

    p_inv = sub.add_parser("invariants", help="print an instanton table")
    p_inv.add_argument("--sector", choices=("closed", "open"), required=True)
    p_inv.add_argument("--max-degree", type=int, required=True)
    p_inv.add_argument("--order", type=int, default=None,
                       help="expansion order (default %(default)s -> 60)")
    p_inv.add_argument("--format", choices=("text", "json"), default="text")
    common(p_inv)
    p_inv.set_defaults(func=cmd_invariants)

    p_ver = sub.add_parser("verify", help="run symbolic verification suites")
    p_ver.add_argument("suite", choices=SUITES)
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (modsolver.CacheFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
