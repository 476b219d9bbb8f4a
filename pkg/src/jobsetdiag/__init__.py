"""Job-set diagnosis for job shop scheduling.

Given jobs that cannot all finish by a makespan deadline, find which jobs to
drop: any subset-minimal drop set, one keeping the most utility, or one
narrowed down by keep/drop questions.
"""
from .bench import BenchmarkRecord, format_table, run_benchmark, summarize, validate_record
from .core import (
    BruteForceBudgetError,
    JobSet,
    JobShopInstance,
    JobSpec,
    OperationSpec,
    Schedule,
    ScheduleCoverageError,
    brute_force_optimal_makespan,
    is_consistent_schedule,
    makespan,
    validate_instance,
)
from .diagnosis import (
    BudgetExhausted,
    Conflict,
    Diagnosis,
    DiagnosisError,
    DiagnosisProblem,
    NoSolution,
    NoSolutionWithinDepth,
    consistent,
    eminc_job,
    enumerate_minimal_conflicts,
    inverse_quickxplain_bound,
    jmp_enumerate,
    jmp_solve,
    jop_solve,
    quickxplain_conflict,
    verify_solvability,
)
from .engine import (
    UNLIMITED,
    CheckOutcome,
    ExternalChecker,
    OptimizeResult,
    SearchBudget,
    Verdict,
    decide_makespan_le,
    heuristic_schedule,
    lower_bound,
    optimize_makespan,
)
from .io import (
    InstanceDocument,
    TaillardParseError,
    document_from_json,
    document_to_json,
    generate_instance,
    parse_taillard,
    read_document,
    serialize_taillard,
    write_document,
)
from .strategy import (
    KappaSchedule,
    OracleSession,
    PreconditionError,
    Unsolvable,
    iterative_kappa_solve,
    minimize_diagnosis,
    oracle_apply_answer,
    oracle_next_query,
)

__version__ = "0.1.0"
