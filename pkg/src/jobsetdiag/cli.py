"""Command-line front end.

Exit codes: 0 success, 1 no solution, 2 parse or usage error, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .bench import DEFAULT_LEVELS, format_table, run_benchmark, summarize
from .core import validate_instance
from .diagnosis import (
    BudgetExhausted,
    DiagnosisError,
    DiagnosisProblem,
    NoSolution,
    NoSolutionWithinDepth,
    enumerate_minimal_conflicts,
    jmp_enumerate,
    jmp_solve,
    jop_solve,
)
from .engine import SearchBudget, decide_makespan_le, optimize_makespan
from .io import (
    InstanceDocument,
    TaillardParseError,
    document_to_json,
    generate_instance,
    read_document,
    serialize_taillard,
)
from .strategy import OracleSession, Unsolvable

EXIT_OK, EXIT_NO_SOLUTION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ids(text: str | None) -> frozenset[int]:
    if not text:
        return frozenset()
    try:
        return frozenset(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"job ids must be integers, got {text!r}") from None


def _fmt(jobs) -> str:
    return "{" + ", ".join(str(j) for j in sorted(jobs)) + "}"


def _budget(args) -> SearchBudget:
    return SearchBudget(max_nodes=args.max_nodes, max_time=args.time_limit)


def _load(path: str) -> InstanceDocument:
    try:
        return read_document(path)
    except TaillardParseError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _problem(args) -> DiagnosisProblem:
    doc = _load(args.file)
    instance = doc.instance
    if getattr(args, "utilities", None):
        try:
            instance = instance.with_utilities([int(u) for u in args.utilities.replace(",", " ").split()])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    background = doc.background | _ids(args.background)
    epsilon = doc.epsilon if args.epsilon is None else args.epsilon
    ratio = doc.epsilon_ratio if args.epsilon_ratio is None else args.epsilon_ratio
    try:
        return DiagnosisProblem(
            instance, args.kappa, epsilon=epsilon, epsilon_ratio=ratio,
            background=background, budget=_budget(args),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_check(args, out: TextIO) -> int:
    doc = _load(args.file)
    subset = _ids(args.subset) if args.subset else (doc.subset or doc.instance.all_jobs)
    if not subset <= doc.instance.all_jobs:
        raise UsageError(f"subset names unknown jobs {sorted(subset - doc.instance.all_jobs)}")
    if args.kappa is None:
        result = optimize_makespan(doc.instance, subset, _budget(args)) if subset else None
        if result is None:
            print("OPTIMUM 0", file=out)
            return EXIT_OK
        print(f"{'OPTIMUM' if result.proven_optimal else 'BEST'} {result.makespan}", file=out)
        print(json.dumps(result.schedule.to_json()), file=out)
        return EXIT_OK if result.proven_optimal else EXIT_BUDGET
    problem = _problem(args)
    outcome = decide_makespan_le(doc.instance, subset, problem.threshold, _budget(args))
    print(outcome.verdict.name, file=out)
    if outcome.witness is not None:
        print(json.dumps(outcome.witness.to_json()), file=out)
    return EXIT_BUDGET if outcome.exhausted else EXIT_OK


def cmd_conflict(args, out: TextIO) -> int:
    problem = _problem(args)
    conflicts = enumerate_minimal_conflicts(problem, args.cap)
    if not conflicts:
        print("no conflict: all jobs fit", file=out)
    for c in conflicts:
        print(f"CONFLICT {_fmt(c.jobs)}", file=out)
    return EXIT_OK


def _print_diagnosis(diag, out: TextIO) -> None:
    print(f"REMOVED: {_fmt(diag.removed)}  kept utility {diag.kept_utility}", file=out)


def cmd_jmp(args, out: TextIO) -> int:
    problem = _problem(args)
    if args.enumerate:
        try:
            found = jmp_enumerate(problem, args.enumerate)
        except BudgetExhausted as exc:
            for diag in exc.partial or ():
                _print_diagnosis(diag, out)
            raise
        for diag in found:
            _print_diagnosis(diag, out)
    else:
        _print_diagnosis(jmp_solve(problem), out)
    return EXIT_OK


def cmd_jop(args, out: TextIO) -> int:
    problem = _problem(args)
    mode = "uniform" if args.uniform else "utility"
    _print_diagnosis(jop_solve(problem, mode, depth_limit=args.depth_limit), out)
    return EXIT_OK


def _read_answer(stdin: TextIO, out: TextIO) -> bool | None:
    while True:
        line = stdin.readline()
        if not line:
            return None
        word = line.strip().lower()
        if word in ("y", "yes"):
            return True
        if word in ("n", "no"):
            return False
        print("please answer y or n", file=out)


def cmd_oracle(args, out: TextIO, stdin: TextIO) -> int:
    problem = _problem(args)
    session = OracleSession(problem)
    scripted = None
    if args.answers is not None:
        scripted = [c for c in args.answers.lower() if not c.isspace() and c != ","]
        if any(c not in "yn" for c in scripted):
            raise UsageError("--answers takes a string of y/n characters")
        scripted = iter(c == "y" for c in scripted)
    while (job := session.next_query()) is not None:
        print(f"QUERY keep job {job}? [y/n]", file=out, flush=True)
        if scripted is not None:
            keep = next(scripted, None)
        else:
            keep = _read_answer(stdin, out)
        if keep is None:
            raise UsageError("ran out of answers before the session was solved")
        session.apply_answer(job, keep)
    for j in session.forced:
        print(f"FORCED drop job {j}", file=out)
    print(f"REMOVED: {_fmt(session.result().removed)}", file=out)
    return EXIT_OK


def cmd_bench(args, out: TextIO) -> int:
    docs = [_load(path) for path in args.files]
    try:
        levels = [float(tok) for tok in args.r.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"--r takes comma separated ratios, got {args.r!r}") from None
    sink = open(args.out, "w") if args.out else None
    try:
        def emit(rec):
            if sink is not None:
                sink.write(rec.to_json() + "\n")
                sink.flush()

        records = run_benchmark(
            docs, levels, args.mode, args.timeout, max_nodes=args.max_nodes, on_record=emit
        )
    finally:
        if sink is not None:
            sink.close()
    out.write(format_table(records))
    print(file=out)
    print("r | mean diag size | ceil(jobs*(1-r))", file=out)
    for row in summarize(records):
        mean = "---" if row["mean_diag_size"] is None else f"{row['mean_diag_size']:.2f}"
        print(f"{row['r']:g} | {mean} | {row['mean_expected_size']:.2f}", file=out)
    return EXIT_OK


def cmd_gen(args, out: TextIO) -> int:
    if args.min_duration < 1 or args.max_duration < args.min_duration:
        raise UsageError("need 1 <= --min-duration <= --max-duration")
    try:
        inst = generate_instance(args.seed, args.jobs, args.machines, (args.min_duration, args.max_duration))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    name = f"gen-s{args.seed}-{args.jobs}x{args.machines}"
    if args.format == "taillard":
        text = serialize_taillard(inst, [name])
    else:
        text = json.dumps(document_to_json(InstanceDocument(inst, name)), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_external_check(args, out: TextIO) -> int:
    """Reference implementation of the external checker protocol."""
    doc = _load(args.problem)
    problems = validate_instance(doc.instance)
    if problems:
        raise UsageError("; ".join(problems))
    subset = doc.subset if doc.subset is not None else doc.instance.all_jobs
    outcome = decide_makespan_le(doc.instance, subset, args.tau, SearchBudget(max_time=args.limit))
    print("UNKNOWN" if outcome.exhausted else outcome.verdict.name, file=out)
    if outcome.witness is not None:
        print(json.dumps(outcome.witness.to_json()), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jobsetdiag",
        description="Find which jobs to drop so a job shop meets a makespan deadline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def budget_opts(p):
        p.add_argument("--max-nodes", type=int, default=None, help="search node cap per check")
        p.add_argument("--time-limit", type=float, default=None, help="seconds per check")

    def problem_opts(p, kappa_required=True):
        p.add_argument("file", help="Taillard text or JSON document")
        p.add_argument("--kappa", type=int, required=kappa_required, help="makespan deadline")
        eps = p.add_mutually_exclusive_group()
        eps.add_argument("--epsilon", type=int, default=None, help="absolute tolerance")
        eps.add_argument("--epsilon-ratio", type=float, default=None, help="tolerance as a fraction of kappa")
        p.add_argument("--background", default=None, help="job ids that must stay, e.g. 0,3")
        budget_opts(p)

    p = sub.add_parser("check", help="decide makespan <= kappa (or optimise without --kappa)")
    problem_opts(p, kappa_required=False)
    p.add_argument("--subset", default=None, help="job ids to schedule (default: all)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("conflict", help="list minimal conflicts")
    problem_opts(p)
    p.add_argument("--cap", type=int, default=1000)
    p.set_defaults(func=cmd_conflict)

    p = sub.add_parser("jmp", help="a subset-minimal set of jobs to drop")
    problem_opts(p)
    p.add_argument("--enumerate", type=int, default=None, metavar="N", help="list up to N diagnoses")
    p.set_defaults(func=cmd_jmp)

    p = sub.add_parser("jop", help="a drop set keeping the most utility")
    problem_opts(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--uniform", action="store_true", help="every job weighs 1")
    mode.add_argument("--utilities", default=None, help="override job utilities, e.g. 2,3,1,4")
    p.add_argument("--depth-limit", type=int, default=None)
    p.set_defaults(func=cmd_jop)

    p = sub.add_parser("oracle", help="interactive keep/drop questions")
    problem_opts(p)
    p.add_argument("--answers", default=None, help="scripted answers such as 'ny'")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run the deadline-level benchmark")
    p.add_argument("files", nargs="+")
    p.add_argument("--r", default=",".join(f"{r:g}" for r in DEFAULT_LEVELS), help="comma separated ratios")
    p.add_argument("--timeout", type=float, default=60.0, help="seconds per record")
    p.add_argument("--mode", choices=("jmp", "jop"), default="jmp")
    p.add_argument("--out", default=None, help="JSONL file for the records")
    p.add_argument("--max-nodes", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, required=True)
    p.add_argument("--machines", type=int, required=True)
    p.add_argument("--min-duration", type=int, default=1)
    p.add_argument("--max-duration", type=int, default=5)
    p.add_argument("--format", choices=("json", "taillard"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("external-check", help="checker protocol: PROBLEM.json TAU LIMIT")
    p.add_argument("problem")
    p.add_argument("tau", type=int)
    p.add_argument("limit", type=float)
    p.set_defaults(func=cmd_external_check)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, stdin: TextIO | None = None) -> int:
    out = out or sys.stdout
    stdin = stdin or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.func is cmd_oracle:
            return cmd_oracle(args, out, stdin)
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhausted as exc:
        print(f"BUDGET EXHAUSTED: {exc}", file=out)
        return EXIT_BUDGET
    except (NoSolution, NoSolutionWithinDepth, Unsolvable) as exc:
        print(f"NO SOLUTION: {exc}", file=out)
        return EXIT_NO_SOLUTION
    except DiagnosisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
