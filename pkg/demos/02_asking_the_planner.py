"""
Letting a planner decide, one question at a time
================================================

The session asks about the job that appears in the most conflicts.  A "keep"
answer may force other jobs out; a "drop" answer may settle everything.
"""

from jobsetdiag import DiagnosisProblem, JobShopInstance, OracleSession

shop = JobShopInstance.from_rows(
    [
        [(0, 2), (1, 2), (2, 2)],
        [(1, 2), (2, 2), (0, 2)],
        [(2, 2), (0, 2), (1, 2)],
        [(0, 3), (1, 2), (2, 1)],
    ]
)
problem = DiagnosisProblem(shop, kappa=6)

for answer in (False, True):
    session = OracleSession(problem)
    while (job := session.next_query()) is not None:
        print(f"keep job {job}?", "yes" if answer else "no")
        session.apply_answer(job, answer)
    print("  forced out:", session.forced, "-> drop", sorted(session.result().removed))

# a transcript replays to the same state
again = OracleSession.replay(problem, [(3, True)])
print("replayed:", sorted(again.result().removed))
