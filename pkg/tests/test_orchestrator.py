import json
import os

import pytest

from conftest import with_ga
from plastoframe.config import fixture_text
from plastoframe.orchestrator import (
    ConfigMismatch,
    Interrupted,
    JournalError,
    _seal,
    load_result,
    read_journal,
    run_design,
    timing_report,
)


@pytest.fixture(scope="module")
def small(two_storey):
    return with_ga(two_storey, p_ext=8, n_ext=4, r_int=2, p_int=30, g_int=10)


TEXT = fixture_text("two_storey")


def summary(result):
    return [(g.population, [(b.fitness, b.bits_a, b.bits_b) for b in g.breakdowns]) for g in result.trace]


def task_lines(path, kind):
    records, _ = read_journal(path)
    return [r for r in records if r.get("type") == "task" and r["kind"] == kind]


@pytest.fixture(scope="module")
def reference(small, tmp_path_factory):
    path = str(tmp_path_factory.mktemp("ref") / "journal.jsonl")
    return run_design(small, workers=1, journal_path=path, config_text=TEXT)


def test_worker_count_does_not_change_result(small, reference):
    parallel = run_design(small, workers=2)
    assert summary(parallel) == summary(reference)
    assert parallel.best.genes == reference.best.genes


def test_trace_shape(small, reference):
    assert len(reference.trace) == small.ga.n_ext
    assert all(len(g.population) == small.ga.p_ext for g in reference.trace)
    best = reference.best
    assert all(b.fitness <= best.fitness for g in reference.trace for b in g.breakdowns)


def test_elite_fitness_never_decreases(reference):
    bests = [g.best().fitness for g in reference.trace]
    assert all(b >= a for a, b in zip(bests, bests[1:]))


def test_each_chromosome_assembled_once(reference):
    ids = [r["id"] for r in task_lines(reference.journal_path, "assemble")]
    assert len(ids) == len(set(ids)) == len(reference.evaluated)
    internal = [r["id"] for r in task_lines(reference.journal_path, "internal")]
    assert len(internal) == len(set(internal)) == 2 * 2 * len(reference.evaluated)


def test_resume_after_interrupt_matches(small, reference, tmp_path):
    path = str(tmp_path / "journal.jsonl")
    with pytest.raises(Interrupted):
        run_design(small, workers=1, journal_path=path, config_text=TEXT, stop_after=1)
    partial = len(task_lines(path, "assemble"))
    assert 0 < partial < len(reference.evaluated)
    resumed = run_design(small, workers=1, journal_path=path, config_text=TEXT)
    assert summary(resumed) == summary(reference)
    ids = [r["id"] for r in task_lines(path, "assemble")]
    assert len(ids) == len(set(ids))


def test_resume_of_finished_run_is_idempotent(small, reference, tmp_path):
    path = str(tmp_path / "journal.jsonl")
    with open(reference.journal_path, "rb") as src, open(path, "wb") as dst:
        dst.write(src.read())
    size = os.path.getsize(path)
    again = run_design(small, workers=1, journal_path=path, config_text=TEXT)
    assert summary(again) == summary(reference)
    assert os.path.getsize(path) == size


def test_torn_trailing_line_is_discarded(small, reference, tmp_path):
    path = str(tmp_path / "journal.jsonl")
    with open(reference.journal_path, "rb") as src:
        data = src.read()
    lines = data.splitlines(keepends=True)
    torn = b"".join(lines[:-3]) + lines[-3][: len(lines[-3]) // 2]
    with open(path, "wb") as fh:
        fh.write(torn)
    records, valid = read_journal(path)
    assert valid == len(b"".join(lines[:-3]))
    resumed = run_design(small, workers=1, journal_path=path, config_text=TEXT)
    assert summary(resumed) == summary(reference)


def test_config_mismatch_refused(small, reference, tmp_path):
    path = str(tmp_path / "journal.jsonl")
    with open(reference.journal_path, "rb") as src, open(path, "wb") as dst:
        dst.write(src.read())
    with pytest.raises(ConfigMismatch):
        run_design(small, workers=1, journal_path=path, config_text=TEXT.replace("q_kn_per_m: 50", "q_kn_per_m: 51"))
    with pytest.raises(ConfigMismatch):
        run_design(with_ga(small, seed=7), workers=1, journal_path=path, config_text=TEXT)


def test_load_result_matches_run(reference):
    loaded = load_result(reference.journal_path)
    assert summary(loaded) == summary(reference)
    assert loaded.best.genes == reference.best.genes


def test_load_result_needs_a_generation(tmp_path):
    path = tmp_path / "journal.jsonl"
    path.write_text(_seal({"type": "header", "version": 1, "config_hash": "x", "seed": 1, "config": TEXT}))
    with pytest.raises(JournalError):
        load_result(str(path))


def test_timing_report_synthetic():
    records = [{"type": "header", "config": TEXT}]
    for genes in ("1 1 1 1", "2 2 2 2"):
        for p in "AB":
            records.append({"type": "task", "id": f"{genes}|{p}|0", "seconds": 2.0})
        records.append({"type": "task", "id": f"{genes}|assemble|0", "seconds": 2.0})
    rep = timing_report(records, n_ext=30)
    assert (rep.internal_a, rep.internal_b, rep.assembly) == (2.0, 2.0, 2.0)
    assert rep.per_chromosome == 4.0
    assert rep.projected_total == 120.0
    assert not rep.complete
    assert "incomplete" in rep.format()


def test_timing_report_from_journal(reference):
    records, _ = read_journal(reference.journal_path)
    rep = timing_report(records)
    assert rep.complete and rep.generations_done == 4
    assert rep.per_chromosome > 0
    assert rep.projected_total == pytest.approx(rep.per_chromosome * 30)


def test_timing_report_empty():
    with pytest.raises(JournalError):
        timing_report([{"type": "header", "config": TEXT}])


def test_journal_lines_are_checksummed(reference):
    with open(reference.journal_path) as fh:
        first = fh.readline()
    header = json.loads(first[9:])
    assert header["type"] == "header" and header["config"] == TEXT
