"""Independent oracles and the seeded corpus shared by the test modules."""
from __future__ import annotations

import itertools
import random
from functools import lru_cache

from jobsetdiag import JobShopInstance, brute_force_optimal_makespan

EXAMPLE_ROWS = [
    [(0, 2), (1, 2), (2, 2)],
    [(1, 2), (2, 2), (0, 2)],
    [(2, 2), (0, 2), (1, 2)],
    [(0, 3), (1, 2), (2, 1)],
]


def example_instance(utilities=None) -> JobShopInstance:
    return JobShopInstance.from_rows(EXAMPLE_ROWS, 3, utilities=utilities)


def permutation_optimum(instance: JobShopInstance, subset) -> int:
    """Minimum makespan by trying every operation order on every machine.

    Each combination of machine sequences is evaluated as a semi-active
    schedule by fixed-point relaxation; cyclic combinations never settle and
    are skipped.  Exponential in everything, so only for a handful of ops.
    """
    jobs = sorted(subset)
    if not jobs:
        return 0
    per_machine: dict[int, list] = {}
    for j in jobs:
        for k, op in enumerate(instance.jobs[j].operations):
            per_machine.setdefault(op.machine, []).append((j, k))
    machines = sorted(per_machine)
    best = None
    for orders in itertools.product(*(itertools.permutations(per_machine[m]) for m in machines)):
        start = {(j, k): 0 for j in jobs for k in range(len(instance.jobs[j].operations))}
        limit = len(start) + 1
        for _ in range(limit):
            changed = False
            for j in jobs:
                ready = instance.jobs[j].arrival
                for k, op in enumerate(instance.jobs[j].operations):
                    if start[(j, k)] < ready:
                        start[(j, k)] = ready
                        changed = True
                    ready = start[(j, k)] + op.duration
            for order in orders:
                for (j1, k1), (j2, k2) in zip(order, order[1:]):
                    end = start[(j1, k1)] + instance.jobs[j1].operations[k1].duration
                    if start[(j2, k2)] < end:
                        start[(j2, k2)] = end
                        changed = True
            if not changed:
                break
        else:
            continue  # machine orders contradict a job sequence
        ms = max(start[(j, k)] + instance.jobs[j].operations[k].duration for j, k in start)
        best = ms if best is None else min(best, ms)
    return best


def random_instance(rng: random.Random, jobs: int, machines: int, utilities: bool = False) -> JobShopInstance:
    rows = []
    for _ in range(jobs):
        order = list(range(machines))
        rng.shuffle(order)
        rows.append([(m, rng.randint(1, 5)) for m in order])
    utils = [rng.randint(1, 5) for _ in range(jobs)] if utilities else None
    return JobShopInstance.from_rows(rows, machines, utilities=utils)


def corpus(count: int, seed: int = 2024, jobs=(4, 7), machines=(2, 4)) -> list[JobShopInstance]:
    rng = random.Random(seed)
    return [
        random_instance(rng, rng.randint(*jobs), rng.randint(*machines), utilities=True)
        for _ in range(count)
    ]


def optimum_table(instance: JobShopInstance) -> dict[frozenset, int]:
    """Exact optimum of every job subset, smallest subsets first."""
    opt = {frozenset(): 0}
    n = instance.n_jobs
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            s = frozenset(combo)
            opt[s] = brute_force_optimal_makespan(instance, s, floor=max(opt[s - {j}] for j in s))
    return opt


@lru_cache(maxsize=None)
def cached_table(rows: tuple, machines: int) -> dict[frozenset, int]:
    return optimum_table(JobShopInstance.from_rows([list(r) for r in rows], machines))


def table_for(instance: JobShopInstance) -> dict[frozenset, int]:
    rows = tuple(tuple((op.machine, op.duration) for op in job.operations) for job in instance.jobs)
    return cached_table(rows, instance.machines)


def minimal_diagnoses(opt: dict, universe: frozenset, background: frozenset, threshold: int) -> list[frozenset]:
    removable = sorted(universe - background)
    fixes = [
        frozenset(d)
        for size in range(len(removable) + 1)
        for d in itertools.combinations(removable, size)
        if opt[universe - frozenset(d)] <= threshold
    ]
    return [d for d in fixes if not any(other < d for other in fixes)]


def minimal_conflicts(opt: dict, universe: frozenset, background: frozenset, threshold: int) -> list[frozenset]:
    removable = sorted(universe - background)
    bad = [
        frozenset(c)
        for size in range(1, len(removable) + 1)
        for c in itertools.combinations(removable, size)
        if opt[background | frozenset(c)] > threshold
    ]
    return [c for c in bad if not any(other < c for other in bad)]
