"""Command-line front end.

Every subcommand writes one record per line (JSON lines) or a CSV table with a
header row.  Exit status: 0 on success, 2 on a configuration error, 3 when a
verification or cross-check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from sympy import primerange

from . import kernels
from .art import DEFAULT_DEPTH, build_art_field, verify_art
from .errors import PadicError, TooLarge
from .functions import exp_domain
from .padic import PadicContext, norm
from .solver import (
    canonical_coupling,
    classify,
    hamiltonian_admissible,
    make_params,
    solve_ti,
    ti_residual,
    z_norm,
    z_recursion_factor,
)
from .tree import (
    ENUMERATION_CAP,
    BoundaryField,
    build_tree,
    check_consistency_escalating,
    partition_function,
)

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 2, 3
ZNORM_MAX_N = 12

CENSUS_COLUMNS = (
    "prime",
    "p_mod_4",
    "p_mod_3",
    "p_mod_6",
    "p_mod_12",
    "coupling",
    "n_solutions",
    "tipggm_count",
    "boundedness",
    "verdict",
    "crosscheck",
)


class ConfigError(Exception):
    pass


# -- argument handling ----------------------------------------------------

def parse_coupling(text: str):
    """``"canonical"`` (``J = p``) or a rational such as ``5`` or ``10/3``."""
    if text == "canonical":
        return None
    try:
        J = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"coupling must be 'canonical' or a rational, got {text!r}")
    if J == 0:
        raise argparse.ArgumentTypeError("coupling must be nonzero")
    return J


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="a single prime p")
    common.add_argument("--primes-up-to", type=int, metavar="N", help="every prime p <= N")
    common.add_argument("--coupling", type=parse_coupling, default=None, metavar="J",
                        help="'canonical' (J = p, the default) or a rational")
    common.add_argument("--order", type=_positive, help="branching order k of the tree")
    common.add_argument("--depth", type=_positive, help="ball radius n")
    common.add_argument("--precision", type=_positive, default=32, help="p-adic working precision")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--threads", type=_positive, default=1, help="worker processes")
    common.add_argument("--no-crosscheck", action="store_true",
                        help="skip the direct root-count cross-check")
    common.add_argument("--timing", action="store_true", help="append per-row wall time")

    parser = argparse.ArgumentParser(
        prog="padic-ising",
        description="Translation-invariant p-adic Ising measures on Cayley trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="census rows for one prime or a range")
    sub.add_parser("census", parents=[common], help="census rows for every prime up to N (default 2000)")
    sub.add_parser("solve-ti", parents=[common], help="translation-invariant roots for k = 2 or 3")
    sub.add_parser("verify-consistency", parents=[common], help="consistency check by enumeration")
    sub.add_parser("art-verify", parents=[common], help="verify the planted order-2 fields")
    sub.add_parser("znorms", parents=[common], help="norms of the normalizing constants")
    return parser


def _primes(args) -> list[int]:
    if args.prime is not None and args.primes_up_to is not None:
        raise ConfigError("give --prime or --primes-up-to, not both")
    if args.prime is not None:
        return [args.prime]
    if args.primes_up_to is not None:
        return [int(p) for p in primerange(2, args.primes_up_to + 1)]
    if args.command == "census":
        return [int(p) for p in primerange(2, 2001)]
    raise ConfigError("--prime or --primes-up-to is required")


def _single_prime(args) -> int:
    if args.primes_up_to is not None or args.prime is None:
        raise ConfigError(f"{args.command} needs exactly one --prime")
    return args.prime


def _check_coupling(p: int, J, precision: int) -> None:
    if J is None:
        return
    ctx = PadicContext(p, precision)
    if 2 * ctx(J) not in exp_domain(ctx):
        raise ConfigError(f"coupling {J} is outside the admissible ball for p={p}")


def _params(args, p: int, k: int):
    ctx = PadicContext(p, args.precision)
    J = canonical_coupling(p) if args.coupling is None else args.coupling
    return make_params(p, J, k, ctx)


def _norm_exponent(x) -> int | None:
    return None if x.is_zero else norm(x).exponent


# -- row producers --------------------------------------------------------

def census_row(p: int, J, precision: int, crosscheck: bool, timing: bool) -> dict:
    start = time.perf_counter()
    c = classify(p, J, PadicContext(p, precision), crosscheck=crosscheck)
    row = {
        "prime": p,
        "p_mod_4": c.residues[4],
        "p_mod_3": c.residues[3],
        "p_mod_6": c.residues[6],
        "p_mod_12": c.residues[12],
        "coupling": str(c.coupling),
        "n_solutions": c.n_solutions,
        "tipggm_count": c.tipggm_count,
        "boundedness": {str(i): flag for i, flag in c.boundedness.items()},
        "verdict": c.verdict,
        "crosscheck": c.crosscheck,
    }
    if timing:
        row["seconds"] = round(time.perf_counter() - start, 6)
    return row


def _census_task(item):
    return census_row(*item)


def cmd_classify(args) -> tuple[list[dict], bool]:
    if args.order not in (None, 3):
        raise ConfigError("the census classifies measures on the order-3 tree only")
    primes = _primes(args)
    for p in primes:
        _check_coupling(p, args.coupling, args.precision)
    items = [(p, args.coupling, args.precision, not args.no_crosscheck, args.timing) for p in primes]
    if args.threads > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            # map keeps prime order regardless of completion order
            rows = list(pool.map(_census_task, items, chunksize=max(1, len(items) // (4 * args.threads))))
    else:
        rows = [_census_task(item) for item in items]
    ok = all(r["crosscheck"] in ("agree", "skipped") for r in rows)
    return rows, ok


def cmd_solve_ti(args) -> tuple[list[dict], bool]:
    k = args.order or 3
    rows = []
    for p in _primes(args):
        params = _params(args, p, k)
        sol = solve_ti(params)
        for i, h in sol.roots.items():
            rows.append({
                "prime": p,
                "order": k,
                "coupling": str(params.coupling),
                "root": i,
                "h": str(h.representative()),
                "h_norm_exponent": _norm_exponent(h),
                "precision": h.precision,
                "residual_exponent": _norm_exponent(ti_residual(h, params)),
            })
    return rows, True


def cmd_verify_consistency(args) -> tuple[list[dict], bool]:
    p = _single_prime(args)
    k = args.order or 3
    n = args.depth or 2
    tree = build_tree(k, n)
    if len(tree.ball(n)) > ENUMERATION_CAP:
        raise TooLarge(f"V_{n} of the order-{k} tree has {len(tree.ball(n))} spins (cap {ENUMERATION_CAP})")
    base = _params(args, p, k)
    if not hamiltonian_admissible(base):
        raise ConfigError(f"coupling {base.coupling} is too large for the Hamiltonian at p={p}")
    required = args.precision - 6
    rows, ok = [], True
    for i in solve_ti(base).roots:
        def build(ctx, i=i):
            params = make_params(p, base.coupling, k, ctx)
            return BoundaryField.constant(tree, solve_ti(params).roots[i], params)

        report = check_consistency_escalating(n, build, base.ctx, required)
        ok &= report.passed
        rows.append({
            "prime": p,
            "order": k,
            "depth": n,
            "root": i,
            "status": report.status,
            "max_residual": str(report.max_residual),
            "required_digits": required,
            "working_precision": report.working_precision,
        })
    return rows, ok


def cmd_art_verify(args) -> tuple[list[dict], bool]:
    p = _single_prime(args)
    k = args.order or 3
    depth = args.depth or DEFAULT_DEPTH
    params = _params(args, p, k)
    arts = [build_art_field(i, params, depth) for i in (1, 2)]
    ones = BoundaryField.constant(arts[0].field.tree, params.ctx.one(), params)
    fields = [ones, arts[0].field, arts[1].field]
    distinct = all(
        not fields[a].same_as(fields[b]) for a in range(3) for b in range(a + 1, 3)
    )
    rows, ok = [], distinct
    for art in arts:
        report = verify_art(art)
        ok &= report.passed
        rows.append({
            "prime": p,
            "order": k,
            "depth": depth,
            "field": art.index,
            "checked": report.checked,
            "max_residual": str(report.max_residual),
            "required_digits": report.required_digits,
            "failures": len(report.failures),
            "passed": report.passed,
            "pairwise_distinct": distinct,
        })
    return rows, ok


def _enumerated(n: int, h, params):
    """``|Z_n|`` by enumeration, or None when out of reach."""
    if not hamiltonian_admissible(params):
        return None
    try:
        tree = build_tree(params.order, n)
    except TooLarge:
        return None
    if len(tree.ball(n)) > ENUMERATION_CAP:
        return None
    return partition_function(n, BoundaryField.constant(tree, h, params))


def cmd_znorms(args) -> tuple[list[dict], bool]:
    p = _single_prime(args)
    k = args.order or 3
    n_max = args.depth or 4
    if n_max > ZNORM_MAX_N:
        raise ConfigError(f"znorms supports n <= {ZNORM_MAX_N}")
    params = _params(args, p, k)
    sol = solve_ti(params)
    rows = []
    for i, h in sol.roots.items():
        prev = None
        for n in range(1, n_max + 1):
            z = z_norm(n, i, params, sol)
            enum = _enumerated(n, h, params)
            recursion = ""
            if enum is not None and prev is not None and not enum.is_zero and not prev.is_zero:
                ratio = norm(enum / prev)
                stated = norm(z_recursion_factor(n - 1, h, params))
                recursion = "agree" if ratio == stated else "mismatch"
            rows.append({
                "prime": p,
                "order": k,
                "root": i,
                "n": n,
                "relation": "<=" if z.is_bound else "=",
                "exponent": z.exponent,
                "bound_exponent": None if z.bound is None else z.bound.exponent,
                "within_bound": z.within_bound,
                "enumerated_exponent": None if enum is None else _norm_exponent(enum),
                "recursion": recursion,
            })
            prev = enum
    return rows, True


COMMANDS = {
    "classify": cmd_classify,
    "census": cmd_classify,
    "solve-ti": cmd_solve_ti,
    "verify-consistency": cmd_verify_consistency,
    "art-verify": cmd_art_verify,
    "znorms": cmd_znorms,
}


# -- output ---------------------------------------------------------------

def _csv_cell(value):
    if isinstance(value, dict):
        return ";".join(f"{k}:{v}" for k, v in value.items())
    if value is None:
        return ""
    return value


def render(rows: list[dict], fmt: str, columns=None) -> str:
    if fmt == "json":
        return "".join(json.dumps(row) + "\n" for row in rows)
    if not rows and columns is None:
        return ""
    buf = io.StringIO(newline="")
    writer = csv.DictWriter(buf, fieldnames=list(columns or rows[0]))
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, ok = COMMANDS[args.command](args)
    except (ConfigError, PadicError, ValueError) as exc:
        print(f"padic-ising: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    columns = None
    if args.command in ("classify", "census"):
        columns = CENSUS_COLUMNS + (("seconds",) if args.timing else ())
    text = render(rows, args.format, columns)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "census":
        print(f"{len(rows)} primes, kernel backend {kernels.BACKEND}", file=sys.stderr)
    if not ok:
        print(f"padic-ising: {args.command}: verification failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
