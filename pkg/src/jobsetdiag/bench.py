"""Deadline-level benchmark: kappa = floor(r * kappa_star) per instance and level."""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import is_consistent_schedule, makespan
from .diagnosis import (
    BudgetExhausted,
    DiagnosisProblem,
    NoSolution,
    consistent,
    jmp_solve,
    jop_solve,
)
from .engine import SearchBudget, optimize_makespan
from .io import InstanceDocument

DEFAULT_LEVELS = (0.95, 0.9, 0.85, 0.8, 0.75)


@dataclass(frozen=True)
class BenchmarkRecord:
    instance_name: str
    jobs: int
    machines: int
    r: float
    kappa: int | None
    diag_size: int | None
    wall_time: float
    status: str  # "solved", "timeout" or "unsolvable"
    removed: list[int] | None = None
    kappa_star: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> BenchmarkRecord:
        return cls(**json.loads(line))


def deadline(r: float, kappa_star: int) -> int:
    """``floor(r * kappa_star)`` computed on the decimal value of ``r``."""
    return math.floor(Fraction(str(r)) * kappa_star)


def _kappa_star(doc: InstanceDocument, timeout: float) -> int | None:
    if doc.kappa_star is not None:
        return int(doc.kappa_star)
    result = optimize_makespan(
        doc.instance, doc.instance.all_jobs, SearchBudget(max_time=timeout)
    )
    return result.makespan if result.proven_optimal else None


def run_benchmark(
    documents: Iterable[InstanceDocument],
    r_levels: Sequence[float] = DEFAULT_LEVELS,
    mode: str = "jmp",
    timeout: float = 60.0,
    *,
    max_nodes: int | None = None,
    on_record: Callable[[BenchmarkRecord], None] | None = None,
) -> list[BenchmarkRecord]:
    """One record per (document, level), in input order.

    ``mode`` is ``"jmp"`` (any minimal diagnosis) or ``"jop"`` (maximum kept
    utility).  ``timeout`` bounds each record's wall time; ``max_nodes``
    additionally caps every single consistency check.
    """
    if mode not in ("jmp", "jop"):
        raise ValueError(f"unknown mode {mode!r}")
    records = []
    for doc in documents:
        inst = doc.instance
        kappa_star = _kappa_star(doc, timeout)
        for r in r_levels:
            started = time.monotonic()
            if kappa_star is None:
                rec = BenchmarkRecord(doc.name, inst.n_jobs, inst.machines, r, None, None, 0.0, "timeout")
            else:
                rec = _solve_level(doc, r, kappa_star, mode, timeout, max_nodes, started)
            records.append(rec)
            if on_record is not None:
                on_record(rec)
    return records


def _solve_level(doc, r, kappa_star, mode, timeout, max_nodes, started) -> BenchmarkRecord:
    inst = doc.instance
    kappa = deadline(r, kappa_star)
    problem = DiagnosisProblem(
        inst,
        kappa,
        epsilon=doc.epsilon,
        epsilon_ratio=doc.epsilon_ratio,
        background=doc.background,
        budget=SearchBudget(max_nodes=max_nodes, deadline=started + timeout),
    )
    base = dict(
        instance_name=doc.name, jobs=inst.n_jobs, machines=inst.machines, r=r, kappa=kappa,
        kappa_star=kappa_star,
    )
    try:
        if mode == "jmp":
            diag = jmp_solve(problem)
        else:
            diag = jop_solve(problem, "utility")
    except BudgetExhausted:
        return BenchmarkRecord(**base, diag_size=None, wall_time=time.monotonic() - started, status="timeout")
    except NoSolution:
        return BenchmarkRecord(**base, diag_size=None, wall_time=time.monotonic() - started, status="unsolvable")
    return BenchmarkRecord(
        **base,
        diag_size=len(diag.removed),
        wall_time=time.monotonic() - started,
        status="solved",
        removed=sorted(diag.removed),
    )


def validate_record(record: BenchmarkRecord, doc: InstanceDocument, spot_checks: int | None = None) -> bool:
    """Re-check a solved record: the kept jobs fit and single re-insertions fail."""
    if record.status != "solved":
        return record.diag_size is None
    problem = DiagnosisProblem(
        doc.instance, record.kappa, epsilon=doc.epsilon, epsilon_ratio=doc.epsilon_ratio,
        background=doc.background,
    )
    removed = frozenset(record.removed)
    kept = problem.universe - removed
    outcome = problem.check(kept)
    if not outcome.consistent:
        return False
    if not is_consistent_schedule(doc.instance, kept, outcome.witness):
        return False
    if makespan(doc.instance, kept, outcome.witness) > problem.threshold:
        return False
    for j in sorted(removed)[:spot_checks]:
        if consistent(problem, kept | {j}):
            return False
    return True


def summarize(records: Iterable[BenchmarkRecord]) -> list[dict]:
    """Mean diagnosis size per level next to the ``ceil(jobs * (1 - r))`` guess."""
    by_r: dict[float, list[BenchmarkRecord]] = {}
    for rec in records:
        by_r.setdefault(rec.r, []).append(rec)
    rows = []
    for r in sorted(by_r, reverse=True):
        recs = by_r[r]
        solved = [rec for rec in recs if rec.status == "solved"]
        guess = [math.ceil(Fraction(str(1 - Fraction(str(r)))) * rec.jobs) for rec in recs]
        rows.append(
            {
                "r": r,
                "records": len(recs),
                "solved": len(solved),
                "mean_diag_size": (sum(rec.diag_size for rec in solved) / len(solved)) if solved else None,
                "mean_expected_size": sum(guess) / len(guess),
            }
        )
    return rows


def _fmt_time(seconds: float) -> str:
    return f"{seconds:.0f}" if seconds >= 10 else f"{seconds:.2f}"


def format_table(records: Iterable[BenchmarkRecord]) -> str:
    """Fixed-width table grouped by deadline level; ``---`` marks timeouts."""
    lines = [f"{'r':>5} | {'diag size':>9} | {'time':>8}", "-" * 28]
    by_r: dict[float, list[BenchmarkRecord]] = {}
    for rec in records:
        by_r.setdefault(rec.r, []).append(rec)
    for n, r in enumerate(sorted(by_r, reverse=True)):
        if n:
            lines.append("-" * 28)
        for rec in by_r[r]:
            if rec.status == "solved":
                size, spent = str(rec.diag_size), _fmt_time(rec.wall_time)
            elif rec.status == "unsolvable":
                size, spent = "none", _fmt_time(rec.wall_time)
            else:
                size, spent = "---", "---"
            lines.append(f"{r:>5g} | {size:>9} | {spent:>8}")
    return "\n".join(lines) + "\n"
