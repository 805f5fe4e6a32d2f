"""``magicdiv`` command line: magic numbers, tables, verification sweeps, benchmarks.

Exit codes: 0 success/PASS, 1 verification or agreement failure,
2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

from magicdiv import bench, codegen, verify
from magicdiv.magic import DomainError, is_power_of_two, precompute_magic
from magicdiv.nbits import MAX_WIDTH, MIN_WIDTH

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_EXHAUSTIVE_BITS = 24


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    """Decimal, ``0x`` hex, or a float literal with an exact integer value (``1e7``)."""
    try:
        return int(text, 0)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _int_list(text: str) -> list[int]:
    return [_int(part) for part in text.split(",") if part.strip()]


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected <lo>..<hi>, got {text!r}")
    return _int(lo), _int(hi)


def _bits(args) -> int:
    if not MIN_WIDTH <= args.bits <= MAX_WIDTH:
        raise UsageError(f"--bits must be in [{MIN_WIDTH}, {MAX_WIDTH}], got {args.bits}")
    return args.bits


def _divisor(bits: int, d: int) -> int:
    if d == 0:
        raise UsageError("zero divisor: the divisor must be a non-zero unsigned integer")
    if not 0 < d < 1 << bits:
        raise UsageError(f"divisor {d} is not a {bits}-bit unsigned integer")
    return d


def _divisor_range(bits: int, lo: int, hi: int) -> range:
    if lo > hi:
        raise UsageError(f"empty divisor range {lo}..{hi}")
    _divisor(bits, lo)
    _divisor(bits, hi)
    return range(lo, hi + 1)


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


# -- magic -------------------------------------------------------------------


def cmd_magic(args) -> int:
    bits = _bits(args)
    d = _divisor(bits, args.divisor)
    params = precompute_magic(bits, d)
    fmt = args.format
    if fmt == "text":
        text = f"p={params.p} m_lo={params.m_lo} ({codegen.hex_word(params.m_lo, bits)})\n"
    elif fmt == "json":
        text = json.dumps({
            "width": bits,
            "d": str(d),
            "p": params.p,
            "m_lo": str(params.m_lo),
            "m_lo_hex": codegen.hex_word(params.m_lo, bits),
            "m_full": str(params.full_magic),
            "pow2": is_power_of_two(params.divisor),
        }, indent=2) + "\n"
    elif fmt == "snippet-general":
        # power-of-two divisors get the single-shift special case
        flavor = "shift-only" if is_power_of_two(params.divisor) else "general"
        text = codegen.render_snippet(params, flavor).render()
    elif fmt == "snippet-bounded":
        text = codegen.render_snippet(params, "bounded").render()
    else:
        raise UsageError(f"format {fmt!r} is not supported by 'magic'")
    with _output(args.out) as fh:
        fh.write(text)
    return EXIT_OK


# -- table -------------------------------------------------------------------


def cmd_table(args) -> int:
    bits = _bits(args)
    if args.range is not None:
        divisors = _divisor_range(bits, *args.range)
    elif args.divisor is not None:
        divisors = [_divisor(bits, args.divisor)]
    else:
        raise UsageError("table needs --range <lo>..<hi> or --divisor")
    rows = codegen.magic_table(bits, divisors)
    if args.format == "csv":
        text = codegen.table_to_csv(rows)
    elif args.format == "json":
        text = codegen.table_to_json(bits, rows)
    else:
        raise UsageError(f"format {args.format!r} is not supported by 'table'")
    with _output(args.out) as fh:
        fh.write(text)
    if args.figure:
        from magicdiv.plotting import plot_magic_table

        plot_magic_table(bits, rows, args.figure)
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def _verify_divisors(args, bits: int):
    if args.all_divisors:
        if bits > MAX_EXHAUSTIVE_BITS:
            raise UsageError(f"--all-divisors is limited to --bits <= {MAX_EXHAUSTIVE_BITS}")
        divisors = range(1, 1 << bits)
    elif args.range is not None:
        divisors = _divisor_range(bits, *args.range)
    elif args.divisor:
        divisors = tuple(_divisor(bits, d) for group in args.divisor for d in group)
    else:
        raise UsageError("verify needs --divisor, --range or --all-divisors")
    return divisors


def _verify_plan(args, bits: int, divisors) -> verify.SweepPlan | None:
    if args.exhaustive:
        if bits > MAX_EXHAUSTIVE_BITS:
            raise UsageError(f"--exhaustive is limited to --bits <= {MAX_EXHAUSTIVE_BITS}")
        strategy = "exhaustive"
    elif args.sample is not None:
        if args.seed is None:
            raise UsageError("--sample needs an explicit --seed")
        strategy = "sample"
    elif args.boundary or not args.find_overflow_witness:
        strategy = "boundary"
    else:
        return None  # witness search only
    return verify.SweepPlan(bits, divisors, strategy,
                            sample_count=args.sample or 0, seed=args.seed)


def _lemma_reports(bits: int, divisors) -> list[verify.VerificationReport]:
    reports = []
    if bits <= verify.MAX_EXHAUSTIVE_LEMMA_WIDTH:
        reports.append(verify.check_lemma_ratio(bits))
    if len(divisors) <= 1 << 17:
        reports.append(verify.check_lemma_33bits(bits, divisors))
        reports.append(verify.check_lemma5_residual(bits, divisors))
    if bits <= 8:
        reports.append(verify.check_product_width(bits))
    return reports


def cmd_verify(args) -> int:
    bits = _bits(args)
    divisors = _verify_divisors(args, bits)
    plan = _verify_plan(args, bits, divisors)
    out: dict = {"width": bits}
    reports = []
    if plan is not None:
        sweep = verify.run_sweep(plan, threads=args.threads)
        reports.append(sweep)
        out["sweep"] = sweep.to_dict()
        lemmas = _lemma_reports(bits, plan.divisors)
        reports.extend(lemmas)
        out["lemmas"] = [r.to_dict() for r in lemmas]

    witnesses = []
    if args.find_overflow_witness:
        for d in divisors:
            w = verify.find_addition_overflow_witness(bits, d, args.budget)
            if w is not None:
                if not w.revalidate():
                    out.setdefault("witness_failures", []).append(str(d))
                witnesses.append(w)
        out["witnesses"] = [
            {"d": str(w.divisor.value), "n": str(w.dividend.value),
             "n_plus_q": str(w.n_plus_q), "revalidated": w.revalidate()}
            for w in witnesses
        ]
        out["witness_budget"] = args.budget

    passed = all(r.passed for r in reports) and "witness_failures" not in out
    out = {"verdict": "PASS" if passed else "FAIL", **out}

    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(out, fh, indent=2)
            fh.write("\n")
        else:
            fh.write(f"verdict: {out['verdict']} (N={bits})\n")
            for r in reports:
                fh.write(f"  {r.name}: {r.verdict} cases={r.cases_run} "
                         f"mismatches={len(r.mismatches)} events={len(r.overflow_events)} "
                         f"lemma_failures={len(r.lemma_failures)}\n")
            for w in witnesses:
                fh.write(f"  witness d={w.divisor.value} n={w.dividend.value} "
                         f"n+q={w.n_plus_q}\n")
            if args.find_overflow_witness and not witnesses:
                fh.write(f"  no overflow witness within budget {args.budget}\n")
    return EXIT_OK if passed else EXIT_FAIL


# -- bench -------------------------------------------------------------------

BENCH_FIELDS = ("d", "note", "native_ns", "general_ns", "bounded_ns",
                "general_ratio", "bounded_ratio")


def _bench_records(report: bench.BenchReport) -> list[dict]:
    return [{
        "d": str(row.d),
        "note": row.note,
        "native_ns": round(row.native.ns_per_op, 4),
        "general_ns": round(row.general.ns_per_op, 4),
        "bounded_ns": round(row.bounded.ns_per_op, 4),
        "general_ratio": round(row.general_ratio, 4),
        "bounded_ratio": round(row.bounded_ratio, 4),
    } for row in report.rows]


def cmd_bench(args) -> int:
    bits = _bits(args)
    if not args.divisors:
        raise UsageError("bench needs --divisors")
    divisors = [_divisor(bits, d) for d in args.divisors]
    if args.iters < 1:
        raise UsageError("--iters must be at least 1")
    report = bench.run_benchmark(bits, divisors, args.iters, args.seed, args.repeats)

    gate = {str(d): {"full": a.passed, "bounded": b.passed,
                     "disagreements": a.disagreements + b.disagreements}
            for d, (a, b) in report.gate.items()}
    with _output(args.out) as fh:
        if args.format == "json":
            records = _bench_records(report)
            for rec, row in zip(records, report.rows):
                timings = {"native": row.native, "general": row.general,
                           "bounded": row.bounded, "native_bounded": row.native_bounded}
                rec["repetitions_ns"] = {
                    name: [round(x, 4) for x in t.repetitions] for name, t in timings.items()
                }
            json.dump({"width": bits, "iterations": args.iters, "seed": str(args.seed),
                       "agreement_gate": "PASS" if report.gate_passed else "FAIL",
                       "gate": gate, "rows": records}, fh, indent=2)
            fh.write("\n")
        elif args.format == "csv":
            writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(_bench_records(report))
        else:
            fh.write(f"agreement gate: {'PASS' if report.gate_passed else 'FAIL'} "
                     f"(N={bits}, {args.iters} dividends, seed {args.seed})\n")
            if report.rows:
                fh.write(f"{'d':>20} {'native ns':>10} {'general ns':>11} {'bounded ns':>11} "
                         f"{'gen/nat':>8} {'bnd/nat':>8}\n")
            for row in report.rows:
                note = f"  [{row.note}]" if row.note else ""
                fh.write(f"{row.d:>20} {row.native.ns_per_op:>10.3f} "
                         f"{row.general.ns_per_op:>11.3f} {row.bounded.ns_per_op:>11.3f} "
                         f"{row.general_ratio:>8.2f} {row.bounded_ratio:>8.2f}{note}\n")
    if not report.gate_passed:
        for d, info in gate.items():
            if info["disagreements"]:
                print(f"error: agreement gate failed for d={d}", file=sys.stderr)
        return EXIT_FAIL
    if args.figure:
        from magicdiv.plotting import plot_benchmark

        plot_benchmark(report, args.figure)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magicdiv",
        description="Unsigned division by constants via round-up magic numbers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--bits", type=_int, required=True, help="register width N (2..64)")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("magic", help="shift offset and magic number for one divisor")
    common(p)
    p.add_argument("--divisor", type=_int, required=True)
    p.add_argument("--format", default="text",
                   choices=("text", "json", "snippet-general", "snippet-bounded"))
    p.set_defaults(func=cmd_magic)

    p = sub.add_parser("table", help="magic numbers for a range of divisors")
    common(p)
    p.add_argument("--range", type=_range, help="inclusive divisor range lo..hi")
    p.add_argument("--divisor", type=_int)
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--figure", help="also write a plot of m_lo and p against d")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="sweep both division paths against native division")
    common(p)
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--divisor", type=_int_list, action="append",
                     help="divisor or comma-separated list (repeatable)")
    sel.add_argument("--range", type=_range)
    sel.add_argument("--all-divisors", action="store_true")
    strat = p.add_mutually_exclusive_group()
    strat.add_argument("--exhaustive", action="store_true", help="every n in [0, 2^N)")
    strat.add_argument("--boundary", action="store_true", help="boundary dividends (default)")
    strat.add_argument("--sample", type=_int, metavar="COUNT",
                       help="COUNT seeded uniform dividends per divisor")
    p.add_argument("--seed", type=_int)
    p.add_argument("--find-overflow-witness", action="store_true",
                   help="search for n where the single-add form n + q overflows")
    p.add_argument("--budget", type=_int, default=1 << 16,
                   help="dividends scanned per divisor in the witness search")
    p.add_argument("--threads", type=int, default=None,
                   help=f"sweep threads (default ${verify.THREADS_ENV}, else auto)")
    p.add_argument("--format", default="json", choices=("json", "text"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time native vs magic-number division")
    common(p)
    p.add_argument("--divisors", type=_int_list, required=True)
    p.add_argument("--iters", type=_int, default=1_000_000)
    p.add_argument("--seed", type=_int, default=0)
    p.add_argument("--repeats", type=int, default=bench.MIN_REPEATS)
    p.add_argument("--format", default="text", choices=("text", "csv", "json"))
    p.add_argument("--figure", help="also write a bar chart of ns/op")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, verify.PlanError) as exc:
        print(f"magicdiv {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
