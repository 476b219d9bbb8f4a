import pytest

from jobsetdiag import (
    DiagnosisProblem,
    KappaSchedule,
    OracleSession,
    PreconditionError,
    Unsolvable,
    iterative_kappa_solve,
    minimize_diagnosis,
    oracle_apply_answer,
    oracle_next_query,
)


@pytest.fixture
def problem(example):
    return DiagnosisProblem(example, 6)


def test_schedule_validation():
    assert KappaSchedule([9, 7, 6]).levels == (9, 7, 6)
    with pytest.raises(ValueError):
        KappaSchedule([6, 6])
    with pytest.raises(ValueError):
        KappaSchedule([])


def test_geometric_schedule():
    levels = KappaSchedule.geometric(30, 20, 4).levels
    assert levels[0] == 30 and levels[-1] == 20
    assert list(levels) == sorted(levels, reverse=True)
    assert KappaSchedule.geometric(5, 9, 3).levels == (9,)
    assert KappaSchedule.geometric(10, 9, 5).levels == (10, 9)


def test_minimize(problem):
    assert minimize_diagnosis(problem, {0, 2, 3}).removed == {0, 2}
    assert minimize_diagnosis(problem, {3}).removed == {3}
    with pytest.raises(PreconditionError):
        minimize_diagnosis(problem, {0})
    with pytest.raises(PreconditionError):
        minimize_diagnosis(problem.with_(background={3}), {3})


def test_iterative(problem):
    assert iterative_kappa_solve(problem, [9, 6]).removed == {0, 2}
    assert iterative_kappa_solve(problem, KappaSchedule((8, 6)), mode="uniform").removed in ({3}, {0, 2})
    with pytest.raises(ValueError):
        iterative_kappa_solve(problem, [9, 7])


def test_iterative_default_schedule(problem):
    assert iterative_kappa_solve(problem).removed in ({3}, {0, 2})
    assert iterative_kappa_solve(problem, steps=1).removed == {0, 2}


def test_oracle_no_branch(problem):
    session = OracleSession(problem)
    assert oracle_next_query(session) == 3
    oracle_apply_answer(session, 3, False)
    assert session.is_solved()
    assert session.result().removed == {3}
    assert session.transcript == [(3, False)]


def test_oracle_yes_branch_drops_forced_jobs(problem):
    session = OracleSession(problem)
    assert session.run([True]).removed == {0, 2}
    assert session.forced == [0, 2]


def test_oracle_without_forced_drops(problem):
    session = OracleSession(problem, drop_forced=False)
    assert session.run([True, False, False]).removed == {0, 2}
    assert [job for job, _ in session.transcript] == [3, 0, 2]


def test_oracle_rejects_wrong_job(problem):
    session = OracleSession(problem)
    session.next_query()
    with pytest.raises(ValueError):
        session.apply_answer(1, True)
    with pytest.raises(ValueError):
        OracleSession(problem).run([])


def test_oracle_unsolvable(problem):
    session = OracleSession(problem, drop_forced=False)
    session.apply_answer(session.next_query(), True)  # keep 3
    job = session.next_query()
    with pytest.raises(Unsolvable):
        session.apply_answer(job, True)  # {job, 3} would be kept whole


def test_oracle_replay(problem):
    session = OracleSession.replay(problem, [(3, True)])
    assert session.is_solved() and session.result().removed == {0, 2}
    with pytest.raises(ValueError):
        OracleSession.replay(problem, [(1, True)])


def test_oracle_nothing_to_ask(example):
    session = OracleSession(DiagnosisProblem(example, 9))
    assert session.next_query() is None
    assert session.result().removed == frozenset()
