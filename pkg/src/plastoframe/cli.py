"""Command line interface: design, assess, mechanisms, oracle, report."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from .config import FIXTURES, ConfigError, fixture_text, parse_problem
from .fitness import PATTERNS, evaluate_profile_chromosome
from .limit import BoundExceeded, mechanisms_for
from .model import ModelError
from .orchestrator import (
    JournalError,
    default_workers,
    load_result,
    read_journal,
    run_design,
    timing_report,
)
from . import oracle, report

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_INFEASIBLE, EXIT_BOUND = 0, 2, 3, 4, 5


def _read_config(value: str) -> str:
    if not os.path.exists(value) and value in FIXTURES:
        return fixture_text(value)
    try:
        with open(value, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read config {value}: {err}") from None


def _load(args):
    text = _read_config(args.config)
    problem = parse_problem(text)
    if getattr(args, "seed", None) is not None:
        problem = replace(problem, ga=replace(problem.ga, seed=args.seed))
    return text, problem


def _chromosome(problem, text: str):
    try:
        genes = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"chromosome {text!r} is not a list of integers") from None
    try:
        return problem.check_chromosome(genes)
    except ModelError as err:
        raise ConfigError(str(err)) from None


def cmd_design(args) -> int:
    text, problem = _load(args)
    journal = args.journal or os.path.join(args.out_dir, "journal.jsonl")
    os.makedirs(os.path.dirname(os.path.abspath(journal)), exist_ok=True)
    result = run_design(problem, workers=args.workers, journal_path=journal, config_text=text)
    records, _ = read_journal(journal)
    files = report.write_bundle(result, args.out_dir, records)
    sys.stdout.write(report.summary_text(result))
    print(f"wrote {len(files)} files to {args.out_dir}")
    if not result.best.feasible:
        print("no feasible design found", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_assess(args) -> int:
    _, problem = _load(args)
    genes = _chromosome(problem, args.chromosome)
    fb = evaluate_profile_chromosome(genes, problem)
    sys.stdout.write(report.assessment_text(problem, fb))
    return EXIT_OK


def cmd_mechanisms(args) -> int:
    _, problem = _load(args)
    genes = _chromosome(problem, args.chromosome) if args.chromosome else (1,) * problem.n_genes
    mset = mechanisms_for(genes, problem)
    text = report.mechanisms_csv(mset)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    counts = mset.counts()
    print(" ".join(f"{k}={v}" for k, v in counts.items()), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_oracle(args) -> int:
    _, problem = _load(args)
    ga_result = load_result(args.journal) if args.journal else None
    if args.external:
        opt = oracle.external_optimum(problem, args.max_bits, args.max_chromosomes, args.workers)
        print(f"exhaustive external optimum over {opt.evaluated} chromosomes ({opt.feasible} feasible)")
        print(f"best {report.genes_str(opt.best.genes)}  F={report.fmt(opt.best.fitness)}")
        if ga_result is not None:
            ga_best = ga_result.best.fitness
            gap = (opt.best.fitness - ga_best) / abs(opt.best.fitness)
            print(f"GA best {report.genes_str(ga_result.best.genes)}  F={report.fmt(ga_best)}  relative gap {gap:.4%}")
        return EXIT_OK
    if not args.chromosome:
        raise ConfigError("oracle needs --chromosome or --external")
    genes = _chromosome(problem, args.chromosome)
    optimum = oracle.internal_optimum(problem, genes, args.max_bits)
    n = len(mechanisms_for(genes, problem))
    print(f"exhaustive internal search over {2 ** n - 1} combinations")
    for p in PATTERNS:
        value, bits = optimum[p]
        line = f"{p}: lambda0*={report.fmt(value)} mechanism={''.join(map(str, bits))}"
        if ga_result is not None and genes in ga_result.evaluated:
            fb = ga_result.evaluated[genes]
            line += f"  GA={report.fmt(fb.lambda0_a if p == 'A' else fb.lambda0_b)}"
        print(line)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        result = load_result(args.journal)
        records, _ = read_journal(args.journal)
    except (OSError, JournalError, KeyError, ValueError) as err:
        print(f"error: unreadable journal: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    files = report.write_bundle(result, args.out_dir, records)
    print(timing_report(records).format())
    print(f"wrote {len(files)} files to {args.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plastoframe", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def config_arg(p):
        p.add_argument("--config", required=True, help=f"config file, or a bundled fixture: {', '.join(FIXTURES)}")

    p = sub.add_parser("design", help="run the nested GA design")
    config_arg(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=None, help="default: $PLASTOFRAME_WORKERS or CPU count")
    p.add_argument("--out-dir", default="out")
    p.add_argument("--journal", help="default: <out-dir>/journal.jsonl; an existing journal is resumed")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("assess", help="seismic assessment of one profile chromosome")
    config_arg(p)
    p.add_argument("--chromosome", required=True, help='e.g. "5 5 3 4"')
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("mechanisms", help="dump the elementary mechanisms")
    config_arg(p)
    p.add_argument("--chromosome")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mechanisms)

    p = sub.add_parser("oracle", help="exhaustive reference searches")
    config_arg(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--chromosome")
    group.add_argument("--external", action="store_true")
    p.add_argument("--max-bits", type=int, default=24)
    p.add_argument("--max-chromosomes", type=int, default=oracle.DEFAULT_MAX_CHROMOSOMES)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--journal", help="compare against a journaled GA run")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="rebuild report files from a journal")
    p.add_argument("--journal", required=True)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except BoundExceeded as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BOUND
    except (JournalError, RuntimeError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
