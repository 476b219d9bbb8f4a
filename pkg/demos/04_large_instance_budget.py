"""
A 100x20 benchmark file under a short budget
============================================

At this size exact consistency checks can take far longer than a demo should.
The solver either returns a drop set whose kept jobs come with a verified
schedule, or says plainly that the budget ran out.
"""

from pathlib import Path

from jobsetdiag import BudgetExhausted, DiagnosisProblem, SearchBudget, jmp_solve, read_document
from jobsetdiag.bench import deadline

doc = read_document(Path(__file__).resolve().parent.parent / "tests" / "data" / "ta71.txt")
print(doc.name, doc.instance.n_jobs, "jobs", doc.instance.n_operations, "operations, optimum", doc.kappa_star)

kappa = deadline(0.95, doc.kappa_star)
problem = DiagnosisProblem(doc.instance, kappa, budget=SearchBudget(max_time=2.0))
try:
    diag = jmp_solve(problem)
    print(f"kappa {kappa}: drop {len(diag.removed)} jobs")
except BudgetExhausted as exc:
    print(f"kappa {kappa}: budget exhausted ({exc})")
