"""Command-line front end: ``bench``, ``tune``, ``check`` and ``eval``.

Sizes are always in 64-bit limbs; one limb holds about 19.27 decimal digits.
Exit status: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

from . import benchkit, fuzz
from .divengine import divide
from .natural import from_decimal, to_decimal

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 2 with the message on stderr
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sizes(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not out or any(n < 1 for n in out):
        raise argparse.ArgumentTypeError(f"sizes must be positive limb counts: {text!r}")
    return out


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return n


def _seed(text: str) -> int:
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from None
    if not 0 <= n < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bigslice", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="run one of the benchmark tables")
    b.add_argument("table", choices=("mul", "halfprod", "shinv", "div", "div2n"))
    b.add_argument("--sizes", type=_sizes, required=True,
                   help="comma-separated limb counts; for 'div' the first is "
                        "the dividend length and the rest are divisor lengths")
    b.add_argument("--repeats", type=_positive, default=10)
    b.add_argument("--seed", type=_seed, default=1)
    b.add_argument("--threads", type=_positive, default=3)
    b.add_argument("--format", choices=("text", "csv"), default="text")

    t = sub.add_parser("tune", help="measure thresholds and write a tuning file")
    t.add_argument("--out", default="bigslice.tuning")
    t.add_argument("--quick", action="store_true", help="small probe budget")
    t.add_argument("--seed", type=_seed, default=1)

    c = sub.add_parser("check", help="randomized differential checks")
    c.add_argument("--cases", type=_positive, default=200)
    c.add_argument("--seed", type=_seed, default=1)
    c.add_argument("--max-limbs", type=_positive, default=128)
    c.add_argument("--start", type=int, default=0,
                   help="first case index (replays a reported case)")
    c.add_argument("--pairs", default=",".join(fuzz.PAIRS),
                   help=f"subset of {','.join(fuzz.PAIRS)}")

    e = sub.add_parser("eval", help="evaluate 'OP A B' on decimal operands")
    e.add_argument("op", choices=("mul", "divq", "divr"))
    e.add_argument("a")
    e.add_argument("b")
    return p


def cmd_bench(args: argparse.Namespace) -> int:
    s, r, seed, th = args.sizes, args.repeats, args.seed, args.threads
    if args.table == "mul":
        table = benchkit.table_mul_equal_lengths(s, r, seed, th)
    elif args.table == "halfprod":
        table = benchkit.table_half_product(s, r, seed, th)
    elif args.table == "shinv":
        table = benchkit.table_shinv(s, r, seed, th)
    elif args.table == "div":
        if len(s) < 2:
            raise _Usage("bench div needs --sizes U,V1[,V2...]")
        if any(v > s[0] for v in s[1:]):
            raise _Usage("divisor lengths must not exceed the dividend length")
        table = benchkit.table_div_shapes(s[0], s[1:], r, seed, th)
    else:
        table = benchkit.table_div_2n_n(s, r, seed, th)
    sys.stdout.write(table.to_csv() if args.format == "csv" else table.to_text())
    agree = table.column("agree") if "agree" in table.columns else []
    return EXIT_OK if all(agree) else EXIT_FAIL


def cmd_tune(args: argparse.Namespace) -> int:
    plan = benchkit.TunePlan.quick() if args.quick else benchkit.TunePlan()
    t0 = time.perf_counter()
    result = benchkit.tune(plan, args.seed, log=lambda m: print(m, file=sys.stderr))
    header = (f"bigslice thresholds, measured in {time.perf_counter() - t0:.1f}s"
              f"{' (quick)' if args.quick else ''}, seed {args.seed}\n"
              "sizes in 64-bit limbs; delete a line to fall back to its default")
    result.save(args.out, header)
    print(args.out)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    pairs = [x.strip() for x in args.pairs.split(",") if x.strip()]
    unknown = [x for x in pairs if x not in fuzz.PAIRS]
    if unknown:
        raise _Usage(f"unknown pair(s): {', '.join(unknown)}")
    failed = 0
    for pair in pairs:
        bad = [m for m in fuzz.run(args.cases, args.seed, args.max_limbs, (pair,), args.start) if m]
        for m in bad:
            print(f"MISMATCH {m}", file=sys.stderr)
        failed += len(bad)
        print(f"{pair:14s} {args.cases - len(bad)}/{args.cases} ok")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        a, b = from_decimal(args.a), from_decimal(args.b)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    if args.op == "mul":
        print(to_decimal(a * b))
        return EXIT_OK
    if not b:
        raise _Usage("division by zero")
    res = divide(a, b, want_remainder=args.op == "divr")
    print(to_decimal(res.q if args.op == "divq" else res.r))
    return EXIT_OK


class _Usage(Exception):
    pass


COMMANDS = {"bench": cmd_bench, "tune": cmd_tune, "check": cmd_check, "eval": cmd_eval}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except _Usage as exc:
        print(f"bigslice {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # malformed tuning file or out-of-range threshold
        print(f"bigslice {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
