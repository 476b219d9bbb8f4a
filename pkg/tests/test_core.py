import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import permutation_optimum, random_instance
from jobsetdiag import (
    BruteForceBudgetError,
    JobShopInstance,
    Schedule,
    ScheduleCoverageError,
    brute_force_optimal_makespan,
    is_consistent_schedule,
    makespan,
    validate_instance,
)


def test_from_rows_defaults(example):
    assert example.n_jobs == 4
    assert example.n_operations == 12
    assert example.all_jobs == frozenset(range(4))
    assert example.utilities() == [1, 1, 1, 1]
    assert [job.arrival for job in example.jobs] == [0, 0, 0, 0]
    assert example.jobs[3].total_duration == 6


def test_machine_count_inferred():
    inst = JobShopInstance.from_rows([[(0, 1), (2, 1)]])
    assert inst.machines == 3


def test_with_utilities(example):
    weighted = example.with_utilities([2, 3, 1, 4])
    assert weighted.utilities() == [2, 3, 1, 4]
    assert example.utilities() == [1, 1, 1, 1]
    with pytest.raises(ValueError):
        example.with_utilities([1, 2])


def test_validate_instance_reports_every_problem():
    inst = JobShopInstance.from_rows([[(0, 0), (5, 2)], []], 2, arrivals=[-1, 0])
    problems = validate_instance(inst)
    text = " ".join(problems)
    assert "duration 0" in text
    assert "machine 5" in text
    assert "no operations" in text
    assert "negative arrival" in text


def test_validate_clean_instance(example):
    assert validate_instance(example) == []


def _serial(instance, subset):
    """Jobs one after another: always feasible."""
    starts, t = {}, 0
    for j in sorted(subset):
        for k, op in enumerate(instance.jobs[j].operations):
            starts[(j, k)] = t
            t += op.duration
    return Schedule(starts), t


def test_serial_schedule_is_consistent(example):
    sched, end = _serial(example, example.all_jobs)
    assert is_consistent_schedule(example, example.all_jobs, sched)
    assert makespan(example, example.all_jobs, sched) == end == 24


def test_overlap_and_order_violations(example):
    sched, _ = _serial(example, {0, 1})
    starts = dict(sched.starts)
    starts[(0, 1)] = 0  # before its predecessor ends
    assert not is_consistent_schedule(example, {0, 1}, Schedule(starts))
    starts = dict(sched.starts)
    starts[(1, 2)] = 0  # machine 0 clash with job 0 op 0
    assert not is_consistent_schedule(example, {0, 1}, Schedule(starts))


def test_arrival_respected():
    inst = JobShopInstance.from_rows([[(0, 2)]], 1, arrivals=[3])
    assert not is_consistent_schedule(inst, {0}, Schedule({(0, 0): 1}))
    assert is_consistent_schedule(inst, {0}, Schedule({(0, 0): 3}))
    assert brute_force_optimal_makespan(inst, {0}) == 5


def test_coverage_errors(example):
    sched, _ = _serial(example, {0})
    with pytest.raises(ScheduleCoverageError):
        is_consistent_schedule(example, {0, 1}, sched)
    with pytest.raises(ScheduleCoverageError):
        makespan(example, set(), sched)


def test_schedule_json_round_trip(example):
    sched, _ = _serial(example, {0, 2})
    again = Schedule.from_json(sched.to_json())
    assert again == sched
    assert hash(again) == hash(sched)
    assert sched.jobs == {0, 2}
    assert sched.to_json()[0] == {"job": 0, "op": 0, "start": 0}


def test_example_optima(example):
    everyone = example.all_jobs
    assert brute_force_optimal_makespan(example, everyone) == 9
    assert [brute_force_optimal_makespan(example, everyone - {j}) for j in range(4)] == [7, 9, 8, 6]
    assert brute_force_optimal_makespan(example, set()) == 0


def test_brute_force_matches_permutation_oracle():
    rng = random.Random(11)
    for _ in range(40):
        nj, nm = rng.randint(2, 4), rng.randint(2, 3)
        rows = [[(m, rng.randint(1, 5)) for m in rng.sample(range(nm), rng.randint(1, nm))] for _ in range(nj)]
        inst = JobShopInstance.from_rows(rows, nm, arrivals=[rng.randint(0, 3) for _ in range(nj)])
        for size in range(1, nj + 1):
            for subset in itertools.combinations(range(nj), size):
                assert brute_force_optimal_makespan(inst, subset) == permutation_optimum(inst, subset)


def test_floor_does_not_change_answer():
    inst = random_instance(random.Random(3), 5, 3)
    opt = brute_force_optimal_makespan(inst, inst.all_jobs)
    assert brute_force_optimal_makespan(inst, inst.all_jobs, floor=opt - 3) == opt


def test_brute_force_node_cap():
    inst = random_instance(random.Random(5), 7, 4)
    with pytest.raises(BruteForceBudgetError):
        brute_force_optimal_makespan(inst, inst.all_jobs, node_cap=3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(1, 3))
def test_removing_jobs_never_raises_optimum(seed, jobs, machines):
    inst = random_instance(random.Random(seed), jobs, machines)
    full = brute_force_optimal_makespan(inst, inst.all_jobs)
    for j in range(jobs):
        assert brute_force_optimal_makespan(inst, inst.all_jobs - {j}) <= full
