"""Resumable parallel driver for the nested design loop.

The master process owns the external GA. Each generation it queues the
internal searches (chromosome x pattern x run) for chromosomes it has not seen
before, waits for all of them, queues one assembly task per new chromosome,
waits again, and only then breeds the next generation. Every finished task is
appended to a journal; on restart the loop is replayed from the start and
journaled tasks are served from the journal instead of being recomputed.

Journal format: one record per line, ``<crc32 hex> <json>``. The first record
is a header holding the format version, the config hash, the master seed and
the config text. A line whose checksum does not match (a torn write) ends the
readable journal and is cut off before new records are appended.
"""
from __future__ import annotations

import json
import logging
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import config_hash, parse_problem
from .fitness import PATTERNS, FitnessBreakdown, assemble, best_of_runs, internal_runs, internal_search
from .ga import STREAM_EXTERNAL, Operators, derive_rng, evolve, random_population
from .model import DesignProblem

log = logging.getLogger(__name__)

JOURNAL_VERSION = 1
WORKERS_ENV = "PLASTOFRAME_WORKERS"


class JournalError(RuntimeError):
    pass


class ConfigMismatch(JournalError):
    pass


class Interrupted(RuntimeError):
    """Raised by the stop hook to emulate a killed run."""


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _seal(record: dict) -> str:
    body = json.dumps(record, sort_keys=True, separators=(",", ":"))
    return f"{zlib.crc32(body.encode()):08x} {body}\n"


def _unseal(line: str) -> Optional[dict]:
    if not line.endswith("\n") or len(line) < 10 or line[8] != " ":
        return None
    body = line[9:-1]
    try:
        if int(line[:8], 16) != zlib.crc32(body.encode()):
            return None
        return json.loads(body)
    except ValueError:
        return None


def read_journal(path: str) -> tuple[list[dict], int]:
    """Valid records and the byte length they occupy."""
    records, valid = [], 0
    with open(path, "rb") as fh:
        for raw in fh:
            rec = _unseal(raw.decode("utf-8", errors="replace"))
            if rec is None:
                break
            records.append(rec)
            valid += len(raw)
    return records, valid


class Journal:
    def __init__(self, path: str, header: dict):
        self.path = path
        self.records: list[dict] = []
        if os.path.exists(path) and os.path.getsize(path) > 0:
            records, valid = read_journal(path)
            if not records or records[0].get("type") != "header":
                raise JournalError(f"{path}: missing journal header")
            old = records[0]
            if old.get("config_hash") != header["config_hash"] or old.get("seed") != header["seed"]:
                raise ConfigMismatch(f"{path}: journal was written for a different config or seed")
            if old.get("version") != JOURNAL_VERSION:
                raise JournalError(f"{path}: unsupported journal version {old.get('version')}")
            with open(path, "r+b") as fh:
                fh.truncate(valid)
            self.records = records
        else:
            self._write(header)
            self.records = [header]

    def _write(self, record: dict) -> None:
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(_seal(record))
                fh.flush()
        except OSError as err:
            raise JournalError(f"cannot write journal {self.path}: {err}") from err

    def append(self, record: dict) -> None:
        self._write(record)
        self.records.append(record)


def task_id(genes: Sequence[int], kind: str, run: int = 0) -> str:
    return f"{' '.join(map(str, genes))}|{kind}|{run}"


# worker side -----------------------------------------------------------------

_PROBLEM: Optional[DesignProblem] = None


def _init_worker(problem: DesignProblem) -> None:
    global _PROBLEM
    _PROBLEM = problem


def _internal_task(args):
    genes, pattern, run = args
    start = time.perf_counter()
    value, bits = internal_search(genes, _PROBLEM, pattern, run)
    return {"lambda0": _num(value), "bits": list(bits)}, time.perf_counter() - start


def _assemble_task(args):
    genes, internal = args
    start = time.perf_counter()
    fb = assemble(genes, _PROBLEM, internal)
    return fb.to_record(), time.perf_counter() - start


def _num(v: float):
    return v if np.isfinite(v) else str(v)


# master side -----------------------------------------------------------------

@dataclass
class GenerationRecord:
    index: int
    population: list[tuple[int, ...]]
    breakdowns: list[FitnessBreakdown]

    @property
    def fitness(self) -> np.ndarray:
        return np.array([b.fitness for b in self.breakdowns])

    def best(self) -> FitnessBreakdown:
        return min(self.breakdowns, key=rank_key)


def rank_key(fb: FitnessBreakdown):
    """Higher fitness first, then smaller mass, then smaller chromosome."""
    return (-fb.fitness, fb.mass, fb.genes)


@dataclass
class DesignResult:
    problem: DesignProblem
    best: FitnessBreakdown
    trace: list[GenerationRecord]
    journal_path: Optional[str] = None
    evaluated: dict = field(default_factory=dict)


def external_operators(problem: DesignProblem) -> Operators:
    ga = problem.ga
    return Operators(1, problem.n_profiles, ga.crossover, ga.mutation_ext, ga.tournament, ga.elite)


class _Runner:
    def __init__(self, problem: DesignProblem, workers: int, journal: Optional[Journal]):
        self.problem = problem
        self.journal = journal
        self.cache: dict[str, tuple[object, float]] = {}
        if journal is not None:
            for rec in journal.records:
                if rec.get("type") == "task":
                    self.cache[rec["id"]] = (rec["result"], rec["seconds"])
        self.workers = workers
        self.pool = None
        if workers > 1:
            self.pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(problem,))
        else:
            _init_worker(problem)

    def close(self) -> None:
        if self.pool is not None:
            self.pool.shutdown()

    def run_tasks(self, fn, items: list, ids: list[str], kind: str) -> list:
        todo = [k for k, tid in enumerate(ids) if tid not in self.cache]
        args = [items[k] for k in todo]
        if self.pool is not None:
            results = self.pool.map(fn, args, chunksize=max(1, len(args) // (4 * self.workers)))
        else:
            results = map(fn, args)
        for k, (result, seconds) in zip(todo, results):
            self.cache[ids[k]] = (result, seconds)
            if self.journal is not None:
                self.journal.append({"type": "task", "kind": kind, "id": ids[k], "result": result, "seconds": seconds})
        return [self.cache[tid][0] for tid in ids]

    def evaluate(self, chromosomes: list[tuple[int, ...]]) -> dict[tuple[int, ...], FitnessBreakdown]:
        runs = internal_runs(self.problem)
        items, ids = [], []
        for genes in chromosomes:
            for p in PATTERNS:
                for r in range(runs):
                    items.append((genes, p, r))
                    ids.append(task_id(genes, p, r))
        flat = self.run_tasks(_internal_task, items, ids, "internal")
        per = iter(flat)
        assemble_items, assemble_ids = [], []
        for genes in chromosomes:
            internal = {}
            for p in PATTERNS:
                runs_p = [next(per) for _ in range(runs)]
                internal[p] = best_of_runs([(float(res["lambda0"]), res["bits"]) for res in runs_p])
            assemble_items.append((genes, internal))
            assemble_ids.append(task_id(genes, "assemble"))
        records = self.run_tasks(_assemble_task, assemble_items, assemble_ids, "assemble")
        return {genes: FitnessBreakdown.from_record(rec) for genes, rec in zip(chromosomes, records)}


def run_design(
    problem: DesignProblem,
    workers: Optional[int] = None,
    journal_path: Optional[str] = None,
    config_text: Optional[str] = None,
    stop_after: Optional[int] = None,
) -> DesignResult:
    """Run the external GA to completion, resuming from ``journal_path`` if present.

    ``stop_after`` raises :class:`Interrupted` once that generation is journaled.
    """
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("workers must be >= 1")
    journal = None
    if journal_path is not None:
        if config_text is None:
            raise ValueError("a journaled run needs the config text")
        header = {
            "type": "header",
            "version": JOURNAL_VERSION,
            "config_hash": config_hash(config_text),
            "seed": problem.ga.seed,
            "config": config_text,
        }
        journal = Journal(journal_path, header)
    journaled_gens = {}
    if journal is not None:
        journaled_gens = {r["index"]: r for r in journal.records if r.get("type") == "generation"}

    ga = problem.ga
    ops = external_operators(problem)
    rng = derive_rng(ga.seed, STREAM_EXTERNAL)
    pop = random_population(rng, ga.p_ext, problem.n_genes, ops)
    runner = _Runner(problem, workers, journal)
    evaluated: dict[tuple[int, ...], FitnessBreakdown] = {}
    trace: list[GenerationRecord] = []
    try:
        for g in range(ga.n_ext):
            chromosomes = [tuple(int(x) for x in row) for row in pop]
            new = list(dict.fromkeys(c for c in chromosomes if c not in evaluated))
            evaluated.update(runner.evaluate(new))
            record = GenerationRecord(g, chromosomes, [evaluated[c] for c in chromosomes])
            trace.append(record)
            snapshot = [list(c) for c in chromosomes]
            if g in journaled_gens:
                if journaled_gens[g]["population"] != snapshot:
                    raise JournalError(f"journal generation {g} does not match the replayed run")
            elif journal is not None:
                journal.append({"type": "generation", "index": g, "population": snapshot})
            log.info("generation %d: best F=%.4f", g, record.best().fitness)
            if stop_after is not None and g == stop_after:
                raise Interrupted(f"stopped after generation {g}")
            if g + 1 < ga.n_ext:
                mass = np.array([b.mass for b in record.breakdowns])
                pop = evolve(np.array(chromosomes), record.fitness, rng, ops, tiebreak=mass)
    finally:
        runner.close()
    if journal is not None and not any(r.get("type") == "done" for r in journal.records):
        journal.append({"type": "done", "generations": ga.n_ext})
    best = min((b for rec in trace for b in rec.breakdowns), key=rank_key)
    return DesignResult(problem, best, trace, journal_path, evaluated)


def problem_from_journal(path: str) -> tuple[DesignProblem, str, list[dict]]:
    records, _ = read_journal(path)
    if not records or records[0].get("type") != "header":
        raise JournalError(f"{path}: not a journal")
    text = records[0]["config"]
    problem = parse_problem(text)
    problem = replace(problem, ga=replace(problem.ga, seed=records[0]["seed"]))
    return problem, text, records


def load_result(path: str) -> DesignResult:
    """Rebuild the trace of a (possibly unfinished) journaled run without computing anything."""
    problem, _, records = problem_from_journal(path)
    evaluated = {}
    for rec in records:
        if rec.get("type") == "task" and rec.get("kind") == "assemble":
            fb = FitnessBreakdown.from_record(rec["result"])
            evaluated[fb.genes] = fb
    trace = []
    for rec in sorted((r for r in records if r.get("type") == "generation"), key=lambda r: r["index"]):
        pop = [tuple(c) for c in rec["population"]]
        trace.append(GenerationRecord(rec["index"], pop, [evaluated[c] for c in pop]))
    if not trace:
        raise JournalError(f"{path}: no completed generation")
    best = min((b for rec in trace for b in rec.breakdowns), key=rank_key)
    return DesignResult(problem, best, trace, path, evaluated)


@dataclass
class TimingReport:
    internal_a: float
    internal_b: float
    assembly: float
    per_chromosome: float
    projected_total: float
    generations_done: int
    complete: bool

    def rows(self) -> list[tuple[str, str]]:
        return [
            ("Internal GA A; Internal GA B (single run)", f"{self.internal_a:.4f}; {self.internal_b:.4f}"),
            ("Fitness Calculation", f"{self.assembly:.4f}"),
            ("Total time for 1 profile chromosome", f"{self.per_chromosome:.4f}"),
            ("Total time for the whole procedure", f"{self.projected_total:.4f}"),
        ]

    def format(self) -> str:
        lines = [f"{'Algorithm':<45} Average seconds"]
        lines += [f"{label:<45} {value}" for label, value in self.rows()]
        if not self.complete:
            lines.append(f"(incomplete run: {self.generations_done} generations journaled)")
        return "\n".join(lines)


def timing_report(records: Iterable[dict], n_ext: Optional[int] = None) -> TimingReport:
    """Average task times; per-chromosome total = mean single internal run + assembly."""
    records = list(records)
    times = {"A": [], "B": [], "assemble": []}
    for rec in records:
        if rec.get("type") != "task":
            continue
        kind = rec["id"].split("|")[1]
        times[kind].append(rec["seconds"])
    if not any(times.values()):
        raise JournalError("journal holds no completed task")
    if n_ext is None and records and records[0].get("type") == "header":
        n_ext = parse_problem(records[0]["config"]).ga.n_ext
    avg = {k: (sum(v) / len(v) if v else 0.0) for k, v in times.items()}
    internal = [avg[p] for p in PATTERNS if times[p]]
    per = (sum(internal) / len(internal) if internal else 0.0) + avg["assemble"]
    gens = sum(1 for r in records if r.get("type") == "generation")
    done = any(r.get("type") == "done" for r in records)
    return TimingReport(avg["A"], avg["B"], avg["assemble"], per, per * (n_ext or 0), gens, done)
