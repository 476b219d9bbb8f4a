"""Exact makespan decision and optimisation by depth-first branch and bound.

Branching follows Giffler-Thompson over active schedules; nodes are bounded by
job chains and by machine loads (with the earliest head and smallest tail of
the operations still waiting on each machine).
"""
from __future__ import annotations

import enum
import json
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import JobSet, JobShopInstance, Schedule

_TIME_CHECK_EVERY = 256


class Verdict(enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SearchBudget:
    """Limits for one engine call.

    ``deadline`` is an absolute :func:`time.monotonic` timestamp shared by many
    calls (the benchmark uses it as a per-record timeout).  Node limits keep
    results reproducible; wall-clock limits do not, whatever ``deterministic``
    says, because the cut-off point depends on machine speed.
    """

    max_nodes: int | None = None
    max_time: float | None = None
    deadline: float | None = None
    deterministic: bool = True

    @property
    def is_limited(self) -> bool:
        return self.max_nodes is not None or self.max_time is not None or self.deadline is not None


UNLIMITED = SearchBudget()


@dataclass(frozen=True)
class CheckOutcome:
    verdict: Verdict
    witness: Schedule | None = None
    lower_bound: int = 0
    upper_bound: int | None = None
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def consistent(self) -> bool:
        return self.verdict is Verdict.CONSISTENT

    @property
    def inconsistent(self) -> bool:
        return self.verdict is Verdict.INCONSISTENT

    @property
    def exhausted(self) -> bool:
        return self.verdict is Verdict.EXHAUSTED


class _OutOfBudget(Exception):
    pass


class _Search:
    """Mutable search state for one subset; reused by decide and optimise."""

    def __init__(self, instance: JobShopInstance, subset: Iterable[int], budget: SearchBudget):
        self.jobs = sorted(frozenset(subset))
        self.machines = instance.machines
        self.ops = [[(op.machine, op.duration) for op in instance.jobs[j].operations] for j in self.jobs]
        self.arrivals = [instance.jobs[j].arrival for j in self.jobs]
        n = len(self.jobs)
        self.tails = []
        self.remaining = []
        for row in self.ops:
            acc = 0
            tail = [0] * len(row)
            for k in range(len(row) - 1, -1, -1):
                tail[k] = acc
                acc += row[k][1]
            self.tails.append(tail)
            self.remaining.append(acc)
        self.nxt = [0] * n
        self.job_ready = list(self.arrivals)
        self.mach_ready = [0] * self.machines
        self.starts = [[0] * len(row) for row in self.ops]

        self.budget = budget
        self.started = time.monotonic()
        stop = budget.deadline
        if budget.max_time is not None:
            own = self.started + budget.max_time
            stop = own if stop is None else min(stop, own)
        self.stop_at = stop
        self.nodes = 0

    # -- bookkeeping ---------------------------------------------------------

    def tick(self) -> None:
        self.nodes += 1
        if self.budget.max_nodes is not None and self.nodes > self.budget.max_nodes:
            raise _OutOfBudget
        if self.stop_at is not None and self.nodes % _TIME_CHECK_EVERY == 0:
            if time.monotonic() >= self.stop_at:
                raise _OutOfBudget

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def schedule(self) -> Schedule:
        return Schedule(
            {(self.jobs[i], k): s for i, row in enumerate(self.starts) for k, s in enumerate(row)}
        )

    # -- bounds and branching ------------------------------------------------

    def bound(self) -> int:
        """Lower bound on any completion of the current partial schedule."""
        lb = 0
        head_min = [None] * self.machines
        tail_min = [None] * self.machines
        load = [0] * self.machines
        for i, row in enumerate(self.ops):
            k0 = self.nxt[i]
            ready = self.job_ready[i]
            if k0 == len(row):
                lb = max(lb, ready)
                continue
            lb = max(lb, ready + self.tails[i][k0] + row[k0][1])
            head = ready
            tails = self.tails[i]
            for k in range(k0, len(row)):
                m, d = row[k]
                load[m] += d
                if head_min[m] is None or head < head_min[m]:
                    head_min[m] = head
                if tail_min[m] is None or tails[k] < tail_min[m]:
                    tail_min[m] = tails[k]
                head += d
        for m in range(self.machines):
            if load[m]:
                lb = max(lb, max(self.mach_ready[m], head_min[m]) + load[m] + tail_min[m])
        return lb

    def conflict_set(self) -> list[int]:
        """Jobs whose next operation competes for the machine finishing first.

        Ordered by most work remaining, then lowest job id.
        """
        best = None
        earliest = {}
        for i, row in enumerate(self.ops):
            k = self.nxt[i]
            if k == len(row):
                continue
            m, d = row[k]
            est = max(self.job_ready[i], self.mach_ready[m])
            earliest[i] = est
            key = (est + d, i)
            if best is None or key < best:
                best = key
        if best is None:
            return []
        c_star, star = best
        m_star = self.ops[star][self.nxt[star]][0]
        out = [
            i
            for i, est in earliest.items()
            if self.ops[i][self.nxt[i]][0] == m_star and est < c_star
        ]
        out.sort(key=lambda i: (-self.work_left(i), i))
        return out

    def work_left(self, i: int) -> int:
        k = self.nxt[i]
        return self.tails[i][k] + self.ops[i][k][1]

    def push(self, i: int) -> tuple:
        k = self.nxt[i]
        m, d = self.ops[i][k]
        saved = (i, k, m, self.job_ready[i], self.mach_ready[m])
        start = max(self.job_ready[i], self.mach_ready[m])
        self.starts[i][k] = start
        self.job_ready[i] = start + d
        self.mach_ready[m] = start + d
        self.nxt[i] = k + 1
        return saved

    def pop(self, saved: tuple) -> None:
        i, k, m, jr, mr = saved
        self.nxt[i] = k
        self.job_ready[i] = jr
        self.mach_ready[m] = mr

    def current_makespan(self) -> int:
        return max(self.job_ready, default=0)

    # -- searches ------------------------------------------------------------

    def decide(self, tau: int) -> tuple[bool, int]:
        """Depth-first search for a complete schedule with makespan <= tau.

        Returns ``(found, frontier)`` where ``frontier`` is the smallest bound
        among pruned nodes; when nothing is found it certifies the optimum.
        """
        frontier = sys.maxsize

        def dive() -> bool:
            nonlocal frontier
            self.tick()
            lb = self.bound()
            if lb > tau:
                frontier = min(frontier, lb)
                return False
            branch = self.conflict_set()
            if not branch:
                return True
            for i in branch:
                saved = self.push(i)
                if dive():
                    return True
                self.pop(saved)
            return False

        return dive(), frontier

    def optimise(self, incumbent: int) -> tuple[int, Schedule | None]:
        """Depth-first search for schedules strictly better than ``incumbent``."""
        best = incumbent
        best_schedule = None

        def dive() -> None:
            nonlocal best, best_schedule
            self.tick()
            if self.bound() >= best:
                return
            branch = self.conflict_set()
            if not branch:
                best = self.current_makespan()
                best_schedule = self.schedule()
                return
            for i in branch:
                saved = self.push(i)
                dive()
                self.pop(saved)

        try:
            dive()
        finally:
            self._best = (best, best_schedule)
        return best, best_schedule


def _ensure_recursion(instance: JobShopInstance) -> None:
    need = instance.n_operations + 200
    if need > sys.getrecursionlimit():
        sys.setrecursionlimit(need)


def lower_bound(instance: JobShopInstance, subset: Iterable[int]) -> int:
    """Largest machine load or job arrival plus chain length over the subset."""
    subset = frozenset(subset)
    load = [0] * instance.machines
    lb = 0
    for j in subset:
        job = instance.jobs[j]
        lb = max(lb, job.arrival + job.total_duration)
        for op in job.operations:
            load[op.machine] += op.duration
    return max([lb, *load])


def heuristic_schedule(instance: JobShopInstance, subset: Iterable[int]) -> tuple[Schedule, int]:
    """Giffler-Thompson dispatching with the most-work-remaining rule."""
    search = _Search(instance, subset, UNLIMITED)
    while True:
        branch = search.conflict_set()
        if not branch:
            break
        search.push(branch[0])
    return search.schedule(), search.current_makespan()


def decide_makespan_le(
    instance: JobShopInstance,
    subset: Iterable[int],
    tau: int,
    budget: SearchBudget = UNLIMITED,
) -> CheckOutcome:
    """Decide whether the subset can be scheduled with makespan at most ``tau``.

    Stops at the first complete schedule within ``tau``.
    """
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    subset = frozenset(subset)
    started = time.monotonic()
    if not subset:
        return CheckOutcome(Verdict.CONSISTENT, Schedule({}), 0, 0, 0, 0.0)
    root_lb = lower_bound(instance, subset)
    if root_lb > tau:
        return CheckOutcome(Verdict.INCONSISTENT, None, root_lb, None, 0, time.monotonic() - started)

    _ensure_recursion(instance)
    search = _Search(instance, subset, budget)
    try:
        found, frontier = search.decide(tau)
    except _OutOfBudget:
        return CheckOutcome(
            Verdict.EXHAUSTED, None, root_lb, None, search.nodes, search.elapsed()
        )
    if found:
        ms = search.current_makespan()
        return CheckOutcome(
            Verdict.CONSISTENT, search.schedule(), root_lb, ms, search.nodes, search.elapsed()
        )
    return CheckOutcome(
        Verdict.INCONSISTENT, None, max(frontier, tau + 1), None, search.nodes, search.elapsed()
    )


@dataclass(frozen=True)
class OptimizeResult:
    schedule: Schedule
    makespan: int
    proven_optimal: bool
    lower_bound: int
    nodes: int = 0
    elapsed: float = 0.0


def optimize_makespan(
    instance: JobShopInstance, subset: Iterable[int], budget: SearchBudget = UNLIMITED
) -> OptimizeResult:
    subset = frozenset(subset)
    if not subset:
        raise ValueError("optimize_makespan needs a non-empty subset")
    started = time.monotonic()
    schedule, ms = heuristic_schedule(instance, subset)
    lb = lower_bound(instance, subset)
    if lb >= ms:
        return OptimizeResult(schedule, ms, True, lb, 0, time.monotonic() - started)
    _ensure_recursion(instance)
    search = _Search(instance, subset, budget)
    try:
        best, better = search.optimise(ms)
        proven = True
    except _OutOfBudget:
        best, better = search._best
        proven = False
    if better is not None:
        schedule, ms = better, best
    return OptimizeResult(schedule, ms, proven, ms if proven else lb, search.nodes, time.monotonic() - started)


@dataclass
class ExternalChecker:
    """Delegate the makespan decision to an external command.

    The command is run as ``command + [problem.json, tau, time_limit]``.  Its
    first stdout line must be ``CONSISTENT``, ``INCONSISTENT`` or ``UNKNOWN``;
    anything after that line is read as an optional witness in the schedule
    JSON format.
    """

    command: Sequence[str]
    time_limit: float = 60.0
    extra_env: dict = field(default_factory=dict)

    def __call__(
        self,
        instance: JobShopInstance,
        subset: Iterable[int],
        tau: int,
        budget: SearchBudget = UNLIMITED,
    ) -> CheckOutcome:
        from .io import document_to_json, InstanceDocument

        subset = frozenset(subset)
        limit = self.time_limit if budget.max_time is None else min(self.time_limit, budget.max_time)
        if budget.deadline is not None:
            limit = max(0.0, min(limit, budget.deadline - time.monotonic()))
        doc = InstanceDocument(instance=instance, subset=subset)
        started = time.monotonic()
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump(document_to_json(doc), fh)
            path = fh.name
        try:
            proc = subprocess.run(
                [*self.command, path, str(tau), f"{limit:g}"],
                capture_output=True,
                text=True,
                timeout=limit + 5.0,
                env={**os.environ, **self.extra_env} if self.extra_env else None,
            )
            out = proc.stdout
        except subprocess.TimeoutExpired:
            out = "UNKNOWN\n"
        finally:
            os.unlink(path)
        return parse_checker_output(out, tau, lower_bound(instance, subset), time.monotonic() - started)


def parse_checker_output(text: str, tau: int, floor: int = 0, elapsed: float = 0.0) -> CheckOutcome:
    lines = text.strip().splitlines()
    head = lines[0].strip() if lines else "UNKNOWN"
    rest = "\n".join(lines[1:]).strip()
    if head == "CONSISTENT":
        witness = Schedule.from_json(json.loads(rest)) if rest else None
        return CheckOutcome(Verdict.CONSISTENT, witness, floor, tau, 0, elapsed)
    if head == "INCONSISTENT":
        return CheckOutcome(Verdict.INCONSISTENT, None, max(floor, tau + 1), None, 0, elapsed)
    if head == "UNKNOWN":
        return CheckOutcome(Verdict.EXHAUSTED, None, floor, None, 0, elapsed)
    raise ValueError(f"unrecognised checker verdict {head!r}")
