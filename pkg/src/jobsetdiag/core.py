"""Job shop domain model, schedule validation and a brute-force makespan oracle.

Jobs are identified by dense 0-based integers and a subset of jobs is a plain
``frozenset[int]``.  Every type here is immutable after construction.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

JobSet = frozenset


class ScheduleCoverageError(ValueError):
    """The schedule's keys do not match the operations of the job subset."""


class BruteForceBudgetError(RuntimeError):
    """The exhaustive enumeration exceeded its node cap."""


@dataclass(frozen=True)
class OperationSpec:
    machine: int
    duration: int


@dataclass(frozen=True)
class JobSpec:
    id: int
    operations: tuple[OperationSpec, ...]
    arrival: int = 0
    utility: int = 1

    @property
    def total_duration(self) -> int:
        return sum(op.duration for op in self.operations)


@dataclass(frozen=True)
class JobShopInstance:
    jobs: tuple[JobSpec, ...]
    machines: int

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[tuple[int, int]]],
        machines: int | None = None,
        *,
        arrivals: Sequence[int] | None = None,
        utilities: Sequence[int] | None = None,
    ) -> JobShopInstance:
        """Build an instance from per-job lists of ``(machine, duration)`` pairs.

        ``machines`` defaults to one more than the largest machine id used.
        """
        jobs = []
        for j, row in enumerate(rows):
            jobs.append(
                JobSpec(
                    id=j,
                    operations=tuple(OperationSpec(int(m), int(d)) for m, d in row),
                    arrival=0 if arrivals is None else int(arrivals[j]),
                    utility=1 if utilities is None else int(utilities[j]),
                )
            )
        if machines is None:
            machines = 1 + max((op.machine for job in jobs for op in job.operations), default=0)
        return cls(tuple(jobs), machines)

    @property
    def n_jobs(self) -> int:
        return len(self.jobs)

    @property
    def all_jobs(self) -> JobSet:
        return frozenset(range(len(self.jobs)))

    @property
    def n_operations(self) -> int:
        return sum(len(job.operations) for job in self.jobs)

    def utilities(self) -> list[int]:
        return [job.utility for job in self.jobs]

    def with_utilities(self, utilities: Sequence[int]) -> JobShopInstance:
        if len(utilities) != len(self.jobs):
            raise ValueError(f"expected {len(self.jobs)} utilities, got {len(utilities)}")
        jobs = tuple(
            JobSpec(job.id, job.operations, job.arrival, int(u)) for job, u in zip(self.jobs, utilities)
        )
        return JobShopInstance(jobs, self.machines)


@dataclass(frozen=True)
class Schedule:
    """Start times keyed by ``(job id, operation index)``."""

    starts: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "starts", dict(self.starts))

    def __hash__(self):
        return hash(frozenset(self.starts.items()))

    @property
    def jobs(self) -> JobSet:
        return frozenset(j for j, _ in self.starts)

    def to_json(self) -> list[dict]:
        return [{"job": j, "op": k, "start": s} for (j, k), s in sorted(self.starts.items())]

    @classmethod
    def from_json(cls, items: Iterable[Mapping]) -> Schedule:
        return cls({(int(it["job"]), int(it["op"])): int(it["start"]) for it in items})


def validate_instance(instance: JobShopInstance) -> list[str]:
    """Return human-readable descriptions of every well-formedness violation."""
    problems = []
    if instance.machines < 1:
        problems.append(f"machine count must be positive, got {instance.machines}")
    for pos, job in enumerate(instance.jobs):
        if job.id != pos:
            problems.append(f"job at position {pos} has id {job.id}")
        if not job.operations:
            problems.append(f"job {job.id} has no operations")
        if job.arrival < 0:
            problems.append(f"job {job.id} has negative arrival {job.arrival}")
        if job.utility < 0:
            problems.append(f"job {job.id} has negative utility {job.utility}")
        for k, op in enumerate(job.operations):
            if op.duration < 1:
                problems.append(f"job {job.id} operation {k} has duration {op.duration} < 1")
            if not 0 <= op.machine < instance.machines:
                problems.append(
                    f"job {job.id} operation {k} uses machine {op.machine} "
                    f"outside 0..{instance.machines - 1}"
                )
    return problems


def _check_coverage(instance: JobShopInstance, subset: Iterable[int], schedule: Schedule) -> None:
    expected = {(j, k) for j in subset for k in range(len(instance.jobs[j].operations))}
    got = set(schedule.starts)
    if expected != got:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        raise ScheduleCoverageError(f"schedule coverage mismatch: missing {missing}, extra {extra}")


def is_consistent_schedule(instance: JobShopInstance, subset: Iterable[int], schedule: Schedule) -> bool:
    """Check arrival, job-sequence and machine-disjointness constraints."""
    subset = frozenset(subset)
    _check_coverage(instance, subset, schedule)
    by_machine: dict[int, list[tuple[int, int]]] = {}
    for j in subset:
        job = instance.jobs[j]
        ready = job.arrival
        for k, op in enumerate(job.operations):
            start = schedule.starts[(j, k)]
            if start < ready:
                return False
            ready = start + op.duration
            by_machine.setdefault(op.machine, []).append((start, ready))
    for intervals in by_machine.values():
        intervals.sort()
        for (_, end), (start, _) in zip(intervals, intervals[1:]):
            if start < end:
                return False
    return True


def makespan(instance: JobShopInstance, subset: Iterable[int], schedule: Schedule) -> int:
    subset = frozenset(subset)
    _check_coverage(instance, subset, schedule)
    return max(
        (
            schedule.starts[(j, k)] + op.duration
            for j in subset
            for k, op in enumerate(instance.jobs[j].operations)
        ),
        default=0,
    )


def brute_force_optimal_makespan(
    instance: JobShopInstance, subset: Iterable[int], node_cap: int = 5_000_000, floor: int = 0
) -> int:
    """Exact optimum by exhaustive enumeration of active schedules.

    Starting from the trivial floor (largest machine load or job chain), each
    candidate deadline is tested by following every Giffler-Thompson branch;
    a branch is only abandoned once some job, or the work still queued on
    some machine, can no longer finish by the deadline.  The first deadline admitting a complete schedule is the
    optimum.  Only meant for tiny instances.

    ``floor`` lets a caller start from a known lower bound, e.g. the optimum
    of a subset (removing jobs never increases the optimum).
    """
    jobs = sorted(frozenset(subset))
    if not jobs:
        return 0
    ops = [[(op.machine, op.duration) for op in instance.jobs[j].operations] for j in jobs]
    n = len(jobs)
    # remaining[i][k]: duration of operations k.. of job i
    remaining = [[sum(d for _, d in row[k:]) for k in range(len(row) + 1)] for row in ops]
    arrivals = tuple(instance.jobs[j].arrival for j in jobs)
    load = [0] * instance.machines
    for row in ops:
        for m, d in row:
            load[m] += d
    deadline = max(floor, max(load), max(a + r[0] for a, r in zip(arrivals, remaining)))
    expanded = 0

    def feasible(state: tuple, tau: int, failed: set) -> bool:
        nonlocal expanded
        nxt, job_ready, mach_ready = state
        if any(job_ready[i] + remaining[i][nxt[i]] > tau for i in range(n)):
            return False
        # operations are appended to machine sequences, so whatever is left on
        # a machine runs after its current release time
        left = [0] * len(mach_ready)
        for i in range(n):
            for m, d in ops[i][nxt[i] :]:
                left[m] += d
        if any(left[m] and mach_ready[m] + left[m] > tau for m in range(len(left))):
            return False
        pending = [i for i in range(n) if nxt[i] < len(ops[i])]
        if not pending:
            return True
        # translate so the earliest pending job is ready at 0
        base = min(job_ready[i] for i in pending)
        busy = set(m for i in pending for m, _ in ops[i][nxt[i] :])
        key = (
            tau - base,
            nxt,
            tuple(job_ready[i] - base if nxt[i] < len(ops[i]) else 0 for i in range(n)),
            tuple(max(mach_ready[m] - base, 0) if m in busy else 0 for m in range(len(mach_ready))),
        )
        if key in failed:
            return False
        expanded += 1
        if expanded > node_cap:
            raise BruteForceBudgetError(f"brute force exceeded {node_cap} states")
        earliest = {}
        for i in pending:
            m, d = ops[i][nxt[i]]
            earliest[i] = max(job_ready[i], mach_ready[m])
        star = min(pending, key=lambda i: (earliest[i] + ops[i][nxt[i]][1], i))
        m_star = ops[star][nxt[star]][0]
        c_star = earliest[star] + ops[star][nxt[star]][1]
        for i in pending:
            m, d = ops[i][nxt[i]]
            if m != m_star or earliest[i] >= c_star:
                continue
            end = earliest[i] + d
            child = (
                nxt[:i] + (nxt[i] + 1,) + nxt[i + 1 :],
                job_ready[:i] + (end,) + job_ready[i + 1 :],
                mach_ready[:m] + (end,) + mach_ready[m + 1 :],
            )
            if feasible(child, tau, failed):
                return True
        failed.add(key)
        return False

    need = instance.n_operations + 100
    if need > sys.getrecursionlimit():
        sys.setrecursionlimit(need)
    start = ((0,) * n, arrivals, (0,) * instance.machines)
    failed: set = set()
    while not feasible(start, deadline, failed):
        deadline += 1
    return deadline
