"""
Four jobs, three machines, one deadline too tight
=================================================

Every job visits each machine once.  The best schedule finishes at 9; the
customer wants everything by 6.  Which jobs should go?
"""

from jobsetdiag import (
    DiagnosisProblem,
    JobShopInstance,
    enumerate_minimal_conflicts,
    jmp_enumerate,
    jop_solve,
    optimize_makespan,
)

# rows are (machine, duration) pairs in visiting order; job ids are 0..3
shop = JobShopInstance.from_rows(
    [
        [(0, 2), (1, 2), (2, 2)],
        [(1, 2), (2, 2), (0, 2)],
        [(2, 2), (0, 2), (1, 2)],
        [(0, 3), (1, 2), (2, 1)],
    ]
)

best = optimize_makespan(shop, shop.all_jobs)
print("optimal makespan:", best.makespan, "(proven)" if best.proven_optimal else "")
for j in range(shop.n_jobs):
    print(f"  without job {j}:", optimize_makespan(shop, shop.all_jobs - {j}).makespan)

problem = DiagnosisProblem(shop, kappa=6)

# conflicts: groups of jobs that can never share the deadline
for c in enumerate_minimal_conflicts(problem):
    print("conflict", sorted(c.jobs))

# every subset-minimal fix
for d in jmp_enumerate(problem, 10):
    print("drop", sorted(d.removed))

# the fix that drops the fewest jobs, and the one that keeps the most value
print("fewest jobs dropped:", sorted(jop_solve(problem, "uniform").removed))
valued = DiagnosisProblem(shop.with_utilities([2, 3, 1, 4]), kappa=6)
pick = jop_solve(valued, "utility")
print("most value kept:", sorted(pick.removed), "utility", pick.kept_utility)

# the surviving jobs come with a schedule that proves they fit
print(pick.witness.to_json()[:3], "...")
