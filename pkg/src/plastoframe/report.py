"""Text, CSV and SVG outputs of a design run."""
from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from typing import Sequence

from .fitness import PATTERNS, FitnessBreakdown, assemble
from .limit import MechanismSet, combine, mechanisms_for
from .model import DesignProblem
from .orchestrator import DesignResult
from . import svg


def fmt(v: float) -> str:
    return f"{v:.4f}" if math.isfinite(v) else str(v)


def genes_str(genes: Sequence[int]) -> str:
    return "[" + " ".join(map(str, genes)) + "]"


def reassess(problem: DesignProblem, fb: FitnessBreakdown) -> FitnessBreakdown:
    """Recompute the assessment objects behind a journaled breakdown."""
    if fb.assessments:
        return fb
    internal = {"A": (fb.lambda0_a, fb.bits_a), "B": (fb.lambda0_b, fb.bits_b)}
    return assemble(fb.genes, problem, internal)


def hinge_list(mset: MechanismSet, bits: Sequence[int], pattern: str) -> list[str]:
    cm = combine(mset, bits, pattern)
    return [f"{mset.sections[s].label()} ({r:+.0f})" for s, r in cm.hinges()]


def assessment_text(problem: DesignProblem, fb: FitnessBreakdown) -> str:
    fb = reassess(problem, fb)
    mset = mechanisms_for(fb.genes, problem)
    lines = [
        f"profile chromosome {genes_str(fb.genes)}",
        f"fitness {fmt(fb.fitness)}  f1 {fmt(fb.f1)}  f2 {fmt(fb.f2)}  f3 {fmt(fb.f3)}  f4 {fmt(fb.f4)}",
        f"mass {fmt(fb.mass)} kg",
    ]
    if fb.reason:
        lines.append(f"infeasible: {fb.reason}")
    for p in PATTERNS:
        bits = fb.bits_a if p == "A" else fb.bits_b
        lam0 = fb.lambda0_a if p == "A" else fb.lambda0_b
        lines.append(f"-- load distribution {p}")
        rows = [(f"lambda0_{p}", fmt(lam0))]
        a = fb.assessments.get(p)
        if a is not None:
            c = a.curve
            rows += [
                (f"gamma_{p}", fmt(c.gamma)),
                (f"lambda_c_{p}", fmt(c.lambda_c)),
                (f"d_cu_{p}", fmt(a.d_cu)),
                (f"d_max_{p}", fmt(a.d_max)),
                (f"SF_{p}", fmt(a.sf)),
                (f"limit_{p}", c.governing_limit),
            ]
        rows += [
            (f"mechanism_{p}", "".join(map(str, bits))),
            (f"hinges_{p}", "; ".join(hinge_list(mset, bits, p))),
        ]
        lines += [f"{label:<12} {value}" for label, value in rows]
    return "\n".join(lines) + "\n"


def mechanisms_csv(mset: MechanismSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "kind", "level", "position", "rotations", "w_ext_h_A", "w_ext_h_B", "w_ext_v"])
    for i, m in enumerate(mset.mechanisms):
        rots = ";".join(f"{mset.sections[s].label()}:{r:+.0f}" for s, r in sorted(m.rotations.items()))
        w.writerow([i + 1, m.kind, m.level, m.index, rots, fmt(m.w_ext_h_a), fmt(m.w_ext_h_b), fmt(m.w_ext_v)])
    return buf.getvalue()


def capacity_csv(assessment) -> str:
    c = assessment.curve
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u_m", "V_kN"])
    for u, v in c.points():
        w.writerow([fmt(u), fmt(v)])
    w.writerow([
        f"# k_e={fmt(c.k_e)} k_i={fmt(c.k_i)} k_s={fmt(c.k_s)} lambda0={fmt(c.lambda0)} "
        f"lambda_c={fmt(c.lambda_c)} gamma={fmt(c.gamma)} limit={c.governing_limit}"
    ])
    return buf.getvalue()


TRACE_HEADER = ["generation", "slot", "chromosome", "F", "f1", "f2", "f3", "f4", "lambda0_A", "lambda0_B"]


def trace_csv(result: DesignResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for rec in result.trace:
        for slot, fb in enumerate(rec.breakdowns):
            w.writerow([
                rec.index, slot, " ".join(map(str, fb.genes)), fmt(fb.fitness), fmt(fb.f1), fmt(fb.f2),
                fmt(fb.f3), fmt(fb.f4), fmt(fb.lambda0_a), fmt(fb.lambda0_b),
            ])
    return buf.getvalue()


def timings_csv(records: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["task", "seconds"])
    for rec in records:
        if rec.get("type") == "task":
            w.writerow([rec["id"], f"{rec['seconds']:.6f}"])
    return buf.getvalue()


def history(result: DesignResult) -> tuple[list[float], list[float]]:
    best, mean, running = [], [], -math.inf
    for rec in result.trace:
        running = max(running, rec.best().fitness)
        best.append(running)
        feas = [b.fitness for b in rec.breakdowns if b.feasible]
        mean.append(sum(feas) / len(feas) if feas else -math.inf)
    return best, mean


def summary_text(result: DesignResult) -> str:
    problem = result.problem
    g = problem.geometry
    head = [
        f"frame: {g.n_floors} floors, {g.n_columns} columns, L={fmt(g.bay_length)} m, H={fmt(g.storey_height)} m",
        f"generations {len(result.trace)}  population {problem.ga.p_ext}  seed {problem.ga.seed}",
        f"distinct chromosomes evaluated {len(result.evaluated)}",
        "",
        "best design",
    ]
    return "\n".join(head) + "\n" + assessment_text(problem, result.best)


def write_bundle(result: DesignResult, out_dir: str, records: Sequence[dict] = ()) -> list[str]:
    """Write every report file plus a manifest with SHA-256 checksums."""
    os.makedirs(out_dir, exist_ok=True)
    problem = result.problem
    best = reassess(problem, result.best)
    mset = mechanisms_for(best.genes, problem)
    files = {
        "summary.txt": summary_text(result),
        "trace.csv": trace_csv(result),
        "mechanisms.csv": mechanisms_csv(mset),
        "history.svg": svg.history_svg(*history(result)),
        "spreading.svg": svg.spreading_svg([rec.population for rec in result.trace]),
    }
    if records:
        files["timings.csv"] = timings_csv(records)
    if best.assessments:
        for p, a in best.assessments.items():
            files[f"capacity_{p}.csv"] = capacity_csv(a)
        files["capacity.svg"] = svg.capacity_svg({p: a.curve for p, a in best.assessments.items()})
        hinges = {
            p: combine(mset, best.bits_a if p == "A" else best.bits_b, p).hinges() for p in PATTERNS
        }
        files["mechanism.svg"] = svg.mechanism_svg(problem.geometry, mset.sections, hinges)
    manifest = []
    for name in sorted(files):
        data = files[name].encode("utf-8")
        with open(os.path.join(out_dir, name), "wb") as fh:
            fh.write(data)
        manifest.append(f"{hashlib.sha256(data).hexdigest()}  {name}")
    with open(os.path.join(out_dir, "manifest.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(manifest) + "\n")
    return sorted(files) + ["manifest.txt"]
