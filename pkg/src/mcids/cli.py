"""Command-line entry point: ``mcids <command> ...``.

Exit codes: 0 on success (for ``bench``: every comparison check passed),
1 on any failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .benchmark import compare, run_bench, summary_table, write_csv
from .corpus import CorpusError, GenConfig, GenerationError, default_counts, generate_corpus, load_corpus, write_corpus
from .detector import detect
from .formula import FormulaError, Logic, expand_derived, format_formula, min_logic, parse_formula
from .signatures import ATTACK_IDS, export_signatures, parse_signature_text, prepare_trace, signature
from .trace import TraceError, load_trace


def _logic(text: str) -> Logic:
    try:
        return Logic.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _logic_list(text: str) -> List[Logic]:
    return [_logic(part) for part in text.split(",") if part.strip()]


def _count(text: str):
    attack, sep, value = text.partition("=")
    if not sep or attack not in ATTACK_IDS:
        raise argparse.ArgumentTypeError(f"expected attack=count with a known attack, got {text!r}")
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"count must be an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"count must be >= 0: {text!r}")
    return attack, n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcids", description="Temporal-logic misuse intrusion detection.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("parse", help="parse a formula and print its core form")
    p.add_argument("formula")
    p.add_argument("--logic", type=_logic, help="target logic (default: the weakest that admits the formula)")

    c = sub.add_parser("check", help="scan one trace with one signature")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--attack", choices=ATTACK_IDS, help="built-in signature")
    src.add_argument("--formula-file", type=Path, help="signature file or plain formula file")
    src.add_argument("--formula", help="formula text")
    c.add_argument("--logic", type=_logic, required=True)
    c.add_argument("--trace", type=Path, required=True, help="JSON-lines trace file")
    c.add_argument("--no-short-circuit", action="store_true", help="scan every scope (full cost statistics)")

    g = sub.add_parser("generate", help="write a synthetic labelled corpus")
    defaults = GenConfig()
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--seed", type=int, default=defaults.seed)
    g.add_argument("--counts", type=_count, nargs="*", default=[], metavar="ATTACK=N")
    g.add_argument("--variant-fraction", type=float, default=defaults.variant_fraction)
    g.add_argument("--benign-count", type=int, default=defaults.benign_count)
    g.add_argument("--decoys-per-attack", type=int, default=defaults.decoys_per_attack)
    g.add_argument("--noise-rate", type=float, default=defaults.noise_rate)
    g.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    b = sub.add_parser("bench", help="run every algorithm over a corpus")
    b.add_argument("--corpus", type=Path, required=True)
    b.add_argument("--out", type=Path, default=Path("bench.csv"))
    b.add_argument("--logics", type=_logic_list, default=list(Logic), help="comma-separated, e.g. prop,ltl")
    mode = b.add_mutually_exclusive_group()
    mode.add_argument("--non-short-circuit", dest="non_short_circuit", action="store_true", default=True,
                      help="scan every scope of every record (default)")
    mode.add_argument("--short-circuit", dest="non_short_circuit", action="store_false",
                      help="stop each scan at its first detection")
    b.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="processes for the counting pass (timing is always single-threaded)")

    e = sub.add_parser("export-signatures", help="write the signature library as files")
    e.add_argument("--out", type=Path, required=True)
    return parser


# --------------------------------------------------------------------------
# commands


def _cmd_parse(args) -> int:
    f = parse_formula(args.formula, args.logic)
    logic = args.logic if args.logic is not None else min_logic(f)
    core = expand_derived(f, logic)
    print(f"logic: {logic}")
    print(f"core: {format_formula(core)}")
    print(f"ast: {core!r}")
    return 0


def _check_encoding(args):
    if args.attack:
        s = signature(args.attack)
        enc = s.encoding(args.logic)
        if enc is None:
            raise FormulaError(f"{args.attack} has no encoding at {args.logic}")
        return enc, s
    text = args.formula if args.formula is not None else args.formula_file.read_text(encoding="utf-8")
    if text.lstrip().startswith("attack:"):
        attack, _logic, _values, enc = parse_signature_text(text)
        s = signature(attack) if attack in ATTACK_IDS else None
        return enc, s
    return parse_formula(text.strip(), args.logic), None


def _cmd_check(args) -> int:
    enc, s = _check_encoding(args)
    tr = load_trace(args.trace)
    if s is not None:
        tr = prepare_trace(tr, s)
    res = detect(tr, enc, args.logic, short_circuit=not args.no_short_circuit)
    print(res.describe())
    print(f"scopes={res.scopes} eval_count={res.stats.eval_count} memo_entries={res.stats.memo_entries}")
    return 0


def _cmd_generate(args) -> int:
    counts: Dict[str, int] = default_counts()
    counts.update(dict(args.counts))
    cfg = GenConfig(
        seed=args.seed,
        counts=counts,
        variant_fraction=args.variant_fraction,
        benign_count=args.benign_count,
        decoys_per_attack=args.decoys_per_attack,
        noise_rate=args.noise_rate,
    )
    start = time.monotonic()
    corpus = generate_corpus(cfg, workers=args.threads)
    write_corpus(corpus, args.out)
    print(f"wrote {len(corpus.records)} records to {args.out} in {time.monotonic() - start:.1f} s")
    print(f"records sha256 {corpus.manifest['records_sha256']}")
    return 0


def _cmd_bench(args) -> int:
    corpus = load_corpus(args.corpus)
    report = run_bench(corpus, logics=args.logics, non_short_circuit=args.non_short_circuit, threads=args.threads)
    write_csv(report, args.out)
    print(summary_table(report))
    print(f"csv written to {args.out}")
    if set(report.logics) != set(Logic):
        print("comparison skipped: it needs all four logics")
        return 0
    summary = compare(report)
    print(summary.text())
    return 0 if summary.passed else 1


def _cmd_export(args) -> int:
    written = export_signatures(args.out)
    print(f"wrote {len(written)} signature files to {args.out}")
    return 0


COMMANDS = {
    "parse": _cmd_parse,
    "check": _cmd_check,
    "generate": _cmd_generate,
    "bench": _cmd_bench,
    "export-signatures": _cmd_export,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (FormulaError, TraceError, CorpusError, GenerationError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
