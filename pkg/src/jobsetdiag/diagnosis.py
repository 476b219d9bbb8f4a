"""Conflicts and diagnoses over job subsets.

The consistency predicate "the kept jobs fit within the threshold" is monotone:
dropping jobs never hurts.  A *conflict* is a set of removable jobs that cannot
all be kept; a *diagnosis* is a set of removable jobs whose removal restores
consistency.  Minimal conflicts come from QuickXPlain, minimal diagnoses from
QuickXPlain run on the inverted predicate, and optimal diagnoses from a
best-first hitting-set tree labelled with minimal conflicts.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from .core import JobSet, JobShopInstance, Schedule
from .engine import UNLIMITED, CheckOutcome, SearchBudget, decide_makespan_le

Checker = Callable[[JobShopInstance, JobSet, int, SearchBudget], CheckOutcome]


class DiagnosisError(Exception):
    pass


class BudgetExhausted(DiagnosisError):
    """A consistency check ran out of budget; no verdict may be assumed.

    ``partial`` holds whatever an enumerating caller had collected so far.
    """

    def __init__(self, kept: JobSet, outcome: CheckOutcome, partial=None):
        super().__init__(
            f"budget exhausted checking {len(kept)} jobs "
            f"(proven lower bound {outcome.lower_bound}, upper bound {outcome.upper_bound})"
        )
        self.kept = kept
        self.outcome = outcome
        self.partial = partial


class NoSolution(DiagnosisError):
    """Even keeping only the background jobs misses the threshold."""


class NoSolutionWithinDepth(DiagnosisError):
    pass


@dataclass(frozen=True)
class DiagnosisProblem:
    """Instance, deadline and the jobs that must stay.

    The threshold used by every check is ``kappa + epsilon`` or, when
    ``epsilon_ratio`` is given, ``kappa + floor(kappa * epsilon_ratio)``.
    ``universe`` restricts the jobs under consideration (all jobs by default);
    jobs outside it are neither scheduled nor eligible for removal.
    Consistency verdicts are cached per kept set for the life of the object.
    """

    instance: JobShopInstance
    kappa: int
    epsilon: int = 0
    epsilon_ratio: float | None = None
    background: JobSet = frozenset()
    budget: SearchBudget = UNLIMITED
    universe: JobSet | None = None
    checker: Checker | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "background", frozenset(self.background))
        if self.universe is None:
            object.__setattr__(self, "universe", self.instance.all_jobs)
        else:
            object.__setattr__(self, "universe", frozenset(self.universe))
        if self.kappa < 0:
            raise ValueError(f"kappa must be non-negative, got {self.kappa}")
        if self.epsilon < 0 or (self.epsilon_ratio is not None and self.epsilon_ratio < 0):
            raise ValueError("epsilon must be non-negative")
        unknown = self.background - self.instance.all_jobs
        if unknown:
            raise ValueError(f"background names unknown jobs {sorted(unknown)}")
        if not self.background <= self.universe:
            raise ValueError("background must lie inside the universe")

    @property
    def threshold(self) -> int:
        if self.epsilon_ratio is not None:
            return self.kappa + math.floor(self.kappa * self.epsilon_ratio)
        return self.kappa + self.epsilon

    @property
    def removable(self) -> JobSet:
        return self.universe - self.background

    def with_(self, **changes) -> DiagnosisProblem:
        """Copy with changed fields.

        The verdict cache is shared when the predicate itself is unchanged
        (only the background, universe or budget moved), and fresh otherwise.
        """
        other = replace(self, **changes)
        if set(changes) <= {"background", "universe", "budget"}:
            object.__setattr__(other, "_cache", self._cache)
        return other

    def check(self, kept: Iterable[int]) -> CheckOutcome:
        kept = frozenset(kept)
        hit = self._cache.get(kept)
        if hit is not None:
            return hit
        checker = self.checker or decide_makespan_le
        outcome = checker(self.instance, kept, self.threshold, self.budget)
        if outcome.exhausted:
            raise BudgetExhausted(kept, outcome)
        self._cache[kept] = outcome
        return outcome

    @property
    def checked_sets(self) -> dict:
        """Every kept set checked so far, mapped to its outcome."""
        return dict(self._cache)

    def kept_utility(self, removed: Iterable[int]) -> int:
        kept = self.universe - frozenset(removed)
        return sum(self.instance.jobs[j].utility for j in kept)


@dataclass(frozen=True)
class Conflict:
    jobs: JobSet

    def __iter__(self):
        return iter(sorted(self.jobs))

    def __len__(self):
        return len(self.jobs)


@dataclass(frozen=True)
class Diagnosis:
    removed: JobSet
    kept_utility: int
    witness: Schedule | None = None
    checks: int = 0

    def __len__(self):
        return len(self.removed)


def consistent(problem: DiagnosisProblem, kept: Iterable[int]) -> bool:
    kept = frozenset(kept)
    if not problem.background <= kept:
        raise ValueError("kept set must contain the background")
    if not kept <= problem.universe:
        raise ValueError("kept set leaves the universe")
    return problem.check(kept).consistent


def verify_solvability(problem: DiagnosisProblem) -> bool:
    return consistent(problem, problem.background)


class _Counter:
    def __init__(self, pred: Callable[[JobSet], bool]):
        self.pred = pred
        self.calls = 0

    def __call__(self, items: JobSet) -> bool:
        self.calls += 1
        return self.pred(items)


def _quickxplain(holds: Callable[[JobSet], bool], candidates: Sequence[int]) -> list[int] | None:
    """Smallest-by-inclusion subset ``X`` of ``candidates`` with ``holds(X)``.

    ``holds`` must be monotone (true on a set implies true on supersets).
    Returns None when even the full candidate list fails.  Elements earlier in
    ``candidates`` are preferred for exclusion from the result.
    """
    if not holds(frozenset(candidates)):
        return None

    def recurse(base: frozenset, check_base: bool, cands: Sequence[int]) -> list[int]:
        if check_base and holds(base):
            return []
        if len(cands) == 1:
            return list(cands)
        split = len(cands) // 2
        first, second = cands[:split], cands[split:]
        d2 = recurse(base | frozenset(first), bool(first), second)
        d1 = recurse(base | frozenset(d2), bool(d2), first)
        return d1 + d2

    if not candidates:
        return []
    return recurse(frozenset(), True, list(candidates))


def quickxplain_conflict(
    problem: DiagnosisProblem, candidates: Iterable[int] | None = None
) -> Conflict | None:
    """A minimal conflict among ``candidates``, or None if they all fit."""
    cands = sorted(problem.removable if candidates is None else frozenset(candidates))
    if problem.background & frozenset(cands):
        raise ValueError("candidates must not overlap the background")
    found = _quickxplain(lambda s: not consistent(problem, problem.background | s), cands)
    return None if found is None else Conflict(frozenset(found))


def _inverse_quickxplain(
    problem: DiagnosisProblem, candidates: Sequence[int], kept_base: JobSet
) -> tuple[list[int] | None, int]:
    """Minimal removal set drawn from ``candidates``; the rest of the universe
    (``kept_base``) always stays.  Returns the set and the check count."""
    counter = _Counter(lambda removed: consistent(problem, problem.universe - removed))
    found = _quickxplain(counter, list(candidates))
    return found, counter.calls


def _make_diagnosis(problem: DiagnosisProblem, removed: Iterable[int], checks: int = 0) -> Diagnosis:
    removed = frozenset(removed)
    outcome = problem.check(problem.universe - removed)
    return Diagnosis(removed, problem.kept_utility(removed), outcome.witness, checks)


def _require_solvable(problem: DiagnosisProblem) -> None:
    if not verify_solvability(problem):
        raise NoSolution(
            f"background jobs {sorted(problem.background)} alone exceed threshold {problem.threshold}"
        )


def jmp_solve(problem: DiagnosisProblem, order: Sequence[int] | None = None) -> Diagnosis:
    """Any subset-minimal diagnosis, found with Inverse QuickXPlain.

    ``order`` optionally ranks the removable jobs; jobs listed first are the
    ones the search tries hardest to keep.
    """
    _require_solvable(problem)
    cands = list(order) if order is not None else sorted(problem.removable)
    if frozenset(cands) != problem.removable:
        raise ValueError("order must list exactly the removable jobs")
    found, checks = _inverse_quickxplain(problem, cands, problem.background)
    if found is None:
        raise NoSolution("removing every non-background job is still inconsistent")
    return _make_diagnosis(problem, found, checks)


def inverse_quickxplain_bound(n: int) -> int:
    """Worst-case number of checks one Inverse QuickXPlain run may spend."""
    if n <= 0:
        return 2
    return 2 * n * (math.ceil(math.log2(n)) + 1) + 2


# -- hitting-set tree --------------------------------------------------------


@dataclass
class _TreeResult:
    leaves: list[JobSet]
    labels: list[JobSet]
    complete: bool


def _hs_tree(
    label_for: Callable[[JobSet], JobSet | None],
    weight: Callable[[int], int],
    *,
    depth_limit: int | None = None,
    stop: Callable[[list, list], bool] = lambda leaves, labels: False,
) -> _TreeResult:
    """Best-first hitting-set tree with node reuse, closing and label reuse.

    ``label_for(path)`` returns a label disjoint from ``path`` or None when the
    path already hits everything.  Nodes are expanded in order of path weight,
    then size, then sorted ids.  Paths that are supersets of a known leaf or
    duplicates of an earlier node are closed.
    """
    leaves: list[JobSet] = []
    labels: list[JobSet] = []

    def priority(path: JobSet) -> tuple:
        return (sum(weight(j) for j in path), len(path), tuple(sorted(path)))

    queue: list = []
    seen: set = set()
    if depth_limit is None or depth_limit >= 0:
        root = frozenset()
        heapq.heappush(queue, (priority(root), root))
        seen.add(root)
    while queue:
        _, path = heapq.heappop(queue)
        if any(leaf <= path for leaf in leaves):
            continue
        label = next((lab for lab in labels if not lab & path), None)
        if label is None:
            label = label_for(path)
            if label is None:
                leaves.append(path)
                if stop(leaves, labels):
                    return _TreeResult(leaves, labels, False)
                continue
            labels.append(label)
            if stop(leaves, labels):
                return _TreeResult(leaves, labels, False)
        if depth_limit is not None and len(path) >= depth_limit:
            continue
        for job in sorted(label):
            child = path | {job}
            if child not in seen:
                seen.add(child)
                heapq.heappush(queue, (priority(child), child))
    return _TreeResult(leaves, labels, True)


def _conflict_label(problem: DiagnosisProblem) -> Callable[[JobSet], JobSet | None]:
    def label(path: JobSet) -> JobSet | None:
        found = quickxplain_conflict(problem, problem.removable - path)
        return None if found is None else found.jobs

    return label


def enumerate_minimal_conflicts(problem: DiagnosisProblem, cap: int = 1000) -> list[Conflict]:
    """All minimal conflicts if there are at most ``cap``, else the first ``cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    _require_solvable(problem)
    result = _hs_tree(
        _conflict_label(problem),
        lambda j: 1,
        stop=lambda leaves, labels: len(labels) >= cap,
    )
    return [Conflict(lab) for lab in result.labels]


def jmp_enumerate(problem: DiagnosisProblem, n: int) -> list[Diagnosis]:
    """Up to ``n`` distinct minimal diagnoses (all of them if fewer exist).

    Each tree node forces the jobs on its path to stay, so Inverse
    QuickXPlain cannot return a diagnosis already found above it.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    _require_solvable(problem)
    found: list[Diagnosis] = []

    def label(path: JobSet) -> JobSet | None:
        forced = problem.with_(background=problem.background | path)
        removed, checks = _inverse_quickxplain(forced, sorted(forced.removable), forced.background)
        if removed is None:
            return None
        found.append(_make_diagnosis(problem, removed, checks))
        return frozenset(removed)

    try:
        _hs_tree(label, lambda j: 1, stop=lambda leaves, labels: len(labels) >= n)
    except BudgetExhausted as exc:
        exc.partial = list(found)
        raise
    return found


def jop_solve(
    problem: DiagnosisProblem, mode: str = "uniform", depth_limit: int | None = None
) -> Diagnosis:
    """A diagnosis keeping the most utility (``mode="utility"``) or the most
    jobs (``mode="uniform"``).

    With ``depth_limit`` only diagnoses of at most that many jobs are
    considered.
    """
    if mode not in ("uniform", "utility"):
        raise ValueError(f"unknown mode {mode!r}")
    _require_solvable(problem)
    if mode == "utility":
        weight = lambda j: problem.instance.jobs[j].utility  # noqa: E731
    else:
        weight = lambda j: 1  # noqa: E731
    before = len(problem._cache)
    result = _hs_tree(
        _conflict_label(problem),
        weight,
        depth_limit=depth_limit,
        stop=lambda leaves, labels: bool(leaves),
    )
    if not result.leaves:
        raise NoSolutionWithinDepth(f"no diagnosis with at most {depth_limit} jobs")
    return _make_diagnosis(problem, result.leaves[0], len(problem._cache) - before)


def eminc_job(conflicts: Sequence[Conflict | Iterable[int]]) -> int:
    """The job occurring in the most conflicts; ties go to the lowest id."""
    if not conflicts:
        raise ValueError("need at least one conflict")
    counts: dict[int, int] = {}
    for conflict in conflicts:
        for j in (conflict.jobs if isinstance(conflict, Conflict) else conflict):
            counts[j] = counts.get(j, 0) + 1
    return min(counts, key=lambda j: (-counts[j], j))
