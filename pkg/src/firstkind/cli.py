"""Command-line interface.

Exit codes: 0 success (empty survivor set where that applies), 1 survivors
found or a tuple check came back negative, 2 usage or I/O error, 3 internal
diagnostic (a precision, bracketing or scan-ceiling guard tripped).
"""
from __future__ import annotations

import argparse
import logging
import sys
from itertools import islice
from typing import List, Optional, Sequence, TextIO

from . import bounds
from .pell import c_values, class_scan_limit, fundamental_solutions, fundamental_unit, reduce_instance
from .records import format_entry, iter_entries, parse_int, write_entries
from .search import (
    Counters,
    IncompleteShardsError,
    SearchConfig,
    case_b_ge_2a,
    enumerate_doubles,
    prune_entry,
    run_search,
    shard_and_merge,
)
from .tuples import classify_triple, d_plus, is_discard_pair, is_m_tuple

EXIT_OK, EXIT_SURVIVORS, EXIT_USAGE, EXIT_DIAGNOSTIC = 0, 1, 2, 3

_TUPLE_NAMES = {2: "pair", 3: "triple", 4: "quadruple", 5: "quintuple"}


def _int_arg(text: str) -> int:
    try:
        return parse_int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_range_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r-min", type=_int_arg, default=2)
    p.add_argument("--r-max", type=_int_arg, default=0, help="default: b-max")
    p.add_argument("--b-max", type=_int_arg, default=1_300_000_000)


def _config(args) -> SearchConfig:
    return SearchConfig(args.r_min, args.r_max, args.b_max,
                        getattr(args, "d_lo_exp", 5), getattr(args, "d_hi_exp", 8))


def _fmt(x, digits: int = 10) -> str:
    return f"{float(x):.{digits}g}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_doubles(args, out: TextIO) -> int:
    n = 0
    for dbl in enumerate_doubles(_config(args)):
        out.write(f"{dbl.a} {dbl.b} {dbl.r}\n")
        n += 1
    print(f"# {n} doubles", file=sys.stderr)
    return EXIT_OK


def cmd_search(args, out: TextIO) -> int:
    cfg = _config(args)
    counters = Counters()
    if args.checkpoint:
        if not args.out:
            raise _Usage("--checkpoint needs --out")
        counters = run_search(cfg, args.shards, args.checkpoint, args.out, args.interval, args.workers)
    else:
        entries = shard_and_merge(cfg, args.shards, args.workers, counters)
        if args.out:
            write_entries(args.out, entries)
        else:
            out.writelines(format_entry(e) for e in entries)
    report = out if args.out else sys.stderr
    print(f"pairs={counters.pairs} potential={counters.potential} survivors={counters.survivors}", file=report)
    return EXIT_OK


def cmd_prune(args, out: TextIO) -> int:
    survivors = []
    n = errors = unmet = 0
    print("# a b c d n0 gamma1 gamma3 lhs rhs verdict", file=out)
    with open(args.input, encoding="ascii") as fh:
        for entry in iter_entries(fh):
            rec = prune_entry(entry, args.prec)
            n += 1
            if rec.survives:
                survivors.append(entry)
            e = " ".join(map(str, entry))
            if rec.error is not None:
                errors += 1
                print(f"{e} - - - - - error ({rec.error})", file=out)
                continue
            p, v = rec.params, rec.verdict
            verdict = "kept" if v.holds else "eliminated"
            if not v.margin_certified:
                verdict += " (within margin)"
            if rec.lemma_unmet:
                unmet += 1
                verdict += " (b/a <= gamma1^2)"
            print(f"{e} {p.n0} {_fmt(p.gamma1)} {_fmt(p.gamma3)} {_fmt(v.lhs)} {_fmt(v.rhs)} {verdict}", file=out)
    if args.out:
        write_entries(args.out, survivors)
    print(f"# entries={n} survivors={len(survivors)} lemma_unmet={unmet} errors={errors}", file=out)
    if errors:
        return EXIT_DIAGNOSTIC
    return EXIT_SURVIVORS if survivors else EXIT_OK


def cmd_case1(args, out: TextIO) -> int:
    rep = case_b_ge_2a(args.prec)
    print(f"b limit (pollock): {rep.b_limit}", file=out)
    print(f"discarded pairs: {len(rep.discarded)}", file=out)
    print("stage 1 doubles:", file=out)
    for a, b in rep.doubles:
        print(f"  {{{a}, {b}}}  d_max={rep.d_bounds[(a, b)]}", file=out)
    print("stage 2 quadruples:", file=out)
    for q in rep.quadruples:
        print(f"  {{{q.a}, {q.b}, {q.c}, {q.d}}}", file=out)
    print("stage 3 final:", file=out)
    for q in rep.final:
        print(f"  {{{q.a}, {q.b}, {q.c}, {q.d}}}", file=out)
    if not rep.final:
        print("  (empty)", file=out)
    return EXIT_SURVIVORS if rep.final else EXIT_OK


def cmd_bounds(args, out: TextIO) -> int:
    print(f"pollock: b <= {bounds.threshold_b('pollock', prec=args.prec)}", file=out)
    print(f"turner: b <= {bounds.threshold_b('turner', prec=args.prec)}", file=out)
    for variant in bounds.STEVE_MARK_VARIANTS:
        b = bounds.threshold_b("steve_mark", args.alpha, args.prec, variant=variant)
        print(f"steve_mark ({variant}, alpha={args.alpha}): b <= {b}", file=out)
    if args.grid_step:
        alpha, b = bounds.optimize_alpha(args.grid_step, args.prec, args.variant)
        print(f"optimize_alpha ({args.variant}, step {args.grid_step}): alpha={float(alpha):.6g} b <= {b}", file=out)
    return EXIT_OK


def cmd_pell(args, out: TextIO) -> int:
    a, b = sorted((args.a, args.b))
    inst = reduce_instance(a, b)
    unit = fundamental_unit(inst.D)
    print(f"double ({a}, {b}), r={inst.r}, g={inst.g}", file=out)
    print(f"X^2 - {inst.D} y^2 = {inst.N}  (X = {inst.b_dag} x)", file=out)
    print(f"fundamental unit: {unit.u} + {unit.v} sqrt({inst.D})", file=out)
    classes = fundamental_solutions(inst, unit)
    print(f"classes (|y| <= {class_scan_limit(inst, unit)}):", file=out)
    for cls in classes:
        print(f"  ({cls.X0}, {cls.y0})", file=out)
    print(f"first {args.count} c: {' '.join(map(str, islice(c_values(a, b), args.count)))}", file=out)
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    vals = sorted(args.values)
    name = _TUPLE_NAMES.get(len(vals), f"{len(vals)}-tuple")
    ok = is_m_tuple(vals)
    print(f"{name}: {'yes' if ok else 'no'}", file=out)
    if ok and len(vals) == 2:
        disc = is_discard_pair(*vals)
        if disc:
            print(f"discard family {disc.family} (k={disc.k})", file=out)
    if ok and len(vals) == 3:
        print(f"kind: {classify_triple(*vals)}", file=out)
        print(f"d+: {d_plus(*vals)}", file=out)
    return EXIT_OK if ok else EXIT_SURVIVORS


# ---------------------------------------------------------------------------


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="firstkind", description="Search and prune for Diophantine quintuples "
                                                   "containing a triple of the first kind.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("doubles", help="list doubles a+2 < b < 2a with ab+1 = r^2")
    _add_range_flags(p)
    p.set_defaults(func=cmd_doubles)

    p = sub.add_parser("search", help="produce the initial list")
    _add_range_flags(p)
    p.add_argument("--d-lo-exp", type=_int_arg, default=5)
    p.add_argument("--d-hi-exp", type=_int_arg, default=8)
    p.add_argument("--shards", type=_int_arg, default=1)
    p.add_argument("--workers", type=_int_arg, default=None, help="pool size (default: min(shards, cores))")
    p.add_argument("--checkpoint", metavar="PATH", help="run manifest; rerun to resume")
    p.add_argument("--interval", type=float, default=5.0, help="seconds between checkpoints")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("prune", help="apply the russell filter to an initial list")
    p.add_argument("input")
    p.add_argument("--out", metavar="PATH", help="survivor records")
    p.add_argument("--prec", type=_int_arg, default=bounds.DEFAULT_PREC)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("case1", help="eliminate b >= 2a")
    p.add_argument("--prec", type=_int_arg, default=bounds.DEFAULT_PREC)
    p.set_defaults(func=cmd_case1)

    p = sub.add_parser("bounds", help="size thresholds for b")
    p.add_argument("--alpha", default="0.9862")
    p.add_argument("--grid-step", default=None, help="also optimize alpha on this grid, e.g. 1e-3")
    p.add_argument("--variant", choices=bounds.STEVE_MARK_VARIANTS, default="printed")
    p.add_argument("--prec", type=_int_arg, default=bounds.DEFAULT_PREC)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("pell", help="solve the Pell instance of one double")
    p.add_argument("a", type=_int_arg)
    p.add_argument("b", type=_int_arg)
    p.add_argument("-k", "--count", type=_int_arg, default=10)
    p.set_defaults(func=cmd_pell)

    p = sub.add_parser("verify", help="check that the arguments form a Diophantine tuple")
    p.add_argument("values", type=_int_arg, nargs="+")
    p.set_defaults(func=cmd_verify)
    return parser


def run_command(argv: Sequence[str], out: Optional[TextIO] = None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _Usage as exc:
        print(f"firstkind: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args, out)
    except _Usage as exc:
        print(f"firstkind {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (bounds.ScanCeilingError, bounds.BracketError) as exc:
        print(f"firstkind {args.command}: diagnostic: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except (OSError, ValueError, IncompleteShardsError) as exc:
        print(f"firstkind {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
