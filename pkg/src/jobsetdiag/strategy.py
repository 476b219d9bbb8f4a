"""Composite strategies: deadline relaxation, post-hoc minimisation and an
interactive keep/drop session driven by the most-frequent-conflict-job rule."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import JobSet
from .engine import optimize_makespan
from .diagnosis import (
    Diagnosis,
    DiagnosisError,
    DiagnosisProblem,
    _inverse_quickxplain,
    _make_diagnosis,
    _require_solvable,
    consistent,
    eminc_job,
    enumerate_minimal_conflicts,
    jmp_solve,
    jop_solve,
)


class PreconditionError(ValueError):
    pass


class Unsolvable(DiagnosisError):
    """Every job of some conflict has been committed to stay."""


@dataclass(frozen=True)
class KappaSchedule:
    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(k) for k in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("a deadline schedule needs at least one level")
        if any(a <= b for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly decreasing, got {levels}")

    @classmethod
    def geometric(cls, start: int, target: int, steps: int) -> KappaSchedule:
        """Interpolate geometrically from ``start`` down to ``target``.

        Rounded levels that collide are merged, so fewer than ``steps`` levels
        may come back.
        """
        if steps < 1:
            raise ValueError("steps must be positive")
        if start <= target or steps == 1:
            return cls((target,))
        ratio = (target / start) if start > 0 else 0.0
        levels = []
        for i in range(steps):
            k = target if i == steps - 1 else math.ceil(start * ratio ** (i / (steps - 1)))
            if not levels or k < levels[-1]:
                levels.append(k)
        if levels[-1] != target:
            levels.append(target)
        return cls(tuple(levels))


def minimize_diagnosis(problem: DiagnosisProblem, candidate: Iterable[int]) -> Diagnosis:
    """Shrink a removal set to a subset-minimal one that still restores consistency."""
    candidate = frozenset(candidate)
    if candidate & problem.background:
        raise PreconditionError("candidate overlaps the background")
    if not candidate <= problem.universe:
        raise PreconditionError("candidate leaves the universe")
    if not consistent(problem, problem.universe - candidate):
        raise PreconditionError(
            f"removing {sorted(candidate)} does not meet threshold {problem.threshold}"
        )
    # only jobs of the candidate may be removed; everything else stays
    restricted = problem.with_(background=problem.universe - candidate)
    removed, checks = _inverse_quickxplain(restricted, sorted(candidate), restricted.background)
    return _make_diagnosis(problem, removed, checks)


def iterative_kappa_solve(
    problem: DiagnosisProblem,
    schedule: KappaSchedule | Sequence[int] | None = None,
    mode: str = "jmp",
    steps: int = 3,
) -> Diagnosis:
    """Solve at each deadline level on the jobs left by earlier levels, then
    minimise the union of removals at the target deadline.

    Without ``schedule`` the levels run geometrically in ``steps`` steps from
    the optimum of the whole universe down to ``problem.kappa``.  ``mode``
    picks the per-level solver: ``"jmp"`` (any minimal diagnosis),
    ``"uniform"`` or ``"utility"`` (optimal diagnosis).
    """
    if schedule is None:
        start = problem.kappa
        if problem.universe:
            start = optimize_makespan(problem.instance, problem.universe, problem.budget).makespan
        schedule = KappaSchedule.geometric(start, problem.kappa, steps)
    elif not isinstance(schedule, KappaSchedule):
        schedule = KappaSchedule(tuple(schedule))
    if schedule.levels[-1] != problem.kappa:
        raise ValueError(f"last level {schedule.levels[-1]} differs from kappa {problem.kappa}")
    _require_solvable(problem)
    removed: JobSet = frozenset()
    for kappa in schedule.levels:
        level = problem.with_(kappa=kappa, universe=problem.universe - removed)
        if mode == "jmp":
            step = jmp_solve(level)
        else:
            step = jop_solve(level, mode)
        removed |= step.removed
    return minimize_diagnosis(problem, removed)


@dataclass
class OracleSession:
    """Keep/drop questions narrowing a problem down to a diagnosis.

    Answers are final.  ``transcript`` records ``(job, keep)`` pairs for every
    answered question.  With ``drop_forced`` set, jobs that form a conflict on
    their own are dropped without asking and listed in ``forced``.
    """

    problem: DiagnosisProblem
    conflict_cap: int = 200
    drop_forced: bool = True
    known_conflicts: list[JobSet] = field(default_factory=list)
    removed: set[int] = field(default_factory=set)
    kept: set[int] = field(default_factory=set)
    forced: list[int] = field(default_factory=list)
    transcript: list[tuple[int, bool]] = field(default_factory=list)
    pending: int | None = None

    def current_problem(self) -> DiagnosisProblem:
        base = self.problem
        return base.with_(
            background=base.background | self.kept,
            universe=base.universe - self.removed,
        )

    def next_query(self) -> int | None:
        """The job to ask about next, or None once no conflict remains."""
        if self.pending is not None:
            return self.pending
        while True:
            current = self.current_problem()
            if not consistent(current, current.background):
                raise Unsolvable(f"kept jobs {sorted(self.kept)} cannot fit together")
            if consistent(current, current.universe):
                self.known_conflicts = []
                return None
            conflicts = enumerate_minimal_conflicts(current, self.conflict_cap)
            self.known_conflicts = [c.jobs for c in conflicts]
            singles = sorted(j for c in conflicts if len(c) == 1 for j in c.jobs)
            if not singles or not self.drop_forced:
                break
            for j in singles:
                self.removed.add(j)
                self.forced.append(j)
        self.pending = eminc_job(conflicts)
        return self.pending

    def apply_answer(self, job: int, keep: bool) -> OracleSession:
        if self.pending is None or job != self.pending:
            raise ValueError(f"job {job} is not the pending question ({self.pending})")
        self.pending = None
        self.transcript.append((job, keep))
        if keep:
            self.kept.add(job)
            updated = []
            for conflict in self.known_conflicts:
                rest = conflict - {job}
                if not rest:
                    raise Unsolvable(f"conflict {sorted(conflict)} has no job left to drop")
                updated.append(rest)
            self.known_conflicts = updated
        else:
            self.removed.add(job)
            self.known_conflicts = [c for c in self.known_conflicts if job not in c]
        return self

    def is_solved(self) -> bool:
        return self.pending is None and self.next_query() is None

    def result(self) -> Diagnosis:
        """Minimal diagnosis implied by the answers so far (session must be solved)."""
        if not self.is_solved():
            raise ValueError("session still has open questions")
        return minimize_diagnosis(self.problem, frozenset(self.removed))

    def run(self, answers: Iterable[bool]) -> Diagnosis:
        """Answer questions from ``answers`` in order until solved."""
        answers = iter(answers)
        while (job := self.next_query()) is not None:
            try:
                keep = next(answers)
            except StopIteration:
                raise ValueError("ran out of answers before the session was solved") from None
            self.apply_answer(job, keep)
        return self.result()

    @classmethod
    def replay(
        cls, problem: DiagnosisProblem, transcript: Iterable[tuple[int, bool]], **options
    ) -> OracleSession:
        session = cls(problem, **options)
        for job, keep in transcript:
            asked = session.next_query()
            if asked != job:
                raise ValueError(f"transcript asks about job {job} but the session asks {asked}")
            session.apply_answer(job, keep)
        return session


def oracle_next_query(session: OracleSession) -> int | None:
    return session.next_query()


def oracle_apply_answer(session: OracleSession, job: int, keep: bool) -> OracleSession:
    return session.apply_answer(job, keep)

