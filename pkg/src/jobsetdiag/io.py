"""Instance files: OR-library/Taillard text, JSON documents, random generation."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .core import JobSet, JobShopInstance, JobSpec, OperationSpec, validate_instance

_OPTIMUM_COMMENT = re.compile(r"^#\s*optimum\s*[:=]\s*(\d+)\s*$", re.IGNORECASE)


class TaillardParseError(ValueError):
    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class InstanceDocument:
    """An instance plus the metadata a diagnosis run needs."""

    instance: JobShopInstance
    name: str = "instance"
    background: JobSet = frozenset()
    kappa_star: int | None = None
    epsilon: int = 0
    epsilon_ratio: float | None = None
    subset: JobSet | None = None
    extra: dict = field(default_factory=dict, compare=False)


def _tokens(line: str):
    for match in re.finditer(r"\S+", line):
        yield match.group(0), match.start() + 1


def parse_taillard(text: str) -> JobShopInstance:
    """Parse the OR-library job shop layout.

    The first line that is neither blank nor a ``#`` comment holds ``n m``;
    each of the next ``n`` such lines holds ``m`` pairs ``machine duration``
    with 0-based machines.  Jobs are numbered in file order.
    """
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = list(_tokens(raw))
        values = []
        for tok, col in toks:
            try:
                values.append(int(tok))
            except ValueError:
                raise TaillardParseError(f"expected an integer, got {tok!r}", lineno, col) from None
        if header is None:
            if len(values) != 2:
                raise TaillardParseError(f"header must be 'jobs machines', got {len(values)} values", lineno)
            n, m = values
            if n < 1 or m < 1:
                raise TaillardParseError("job and machine counts must be positive", lineno)
            header = (n, m)
            continue
        n, m = header
        if len(rows) == n:
            raise TaillardParseError(f"more than {n} job lines", lineno)
        if len(values) != 2 * m:
            raise TaillardParseError(
                f"job line must hold {m} machine/duration pairs ({2 * m} values), got {len(values)}",
                lineno,
            )
        ops = []
        for k in range(m):
            machine, duration = values[2 * k], values[2 * k + 1]
            if not 0 <= machine < m:
                raise TaillardParseError(
                    f"machine id {machine} outside 0..{m - 1}", lineno, toks[2 * k][1]
                )
            if duration < 1:
                raise TaillardParseError(f"duration {duration} must be positive", lineno, toks[2 * k + 1][1])
            ops.append(OperationSpec(machine, duration))
        rows.append(JobSpec(len(rows), tuple(ops)))
    if header is None:
        raise TaillardParseError("missing 'jobs machines' header", 1)
    if len(rows) != header[0]:
        raise TaillardParseError(f"expected {header[0]} job lines, found {len(rows)}", lineno)
    return JobShopInstance(tuple(rows), header[1])


def serialize_taillard(instance: JobShopInstance, comments: list[str] = ()) -> str:
    """Inverse of :func:`parse_taillard` for instances with one operation per
    machine per job; arrivals and utilities are not representable."""
    lines = [f"# {c}" for c in comments]
    lines.append(f"{instance.n_jobs} {instance.machines}")
    for job in instance.jobs:
        if len(job.operations) != instance.machines:
            raise ValueError(f"job {job.id} does not have exactly one operation per machine")
        lines.append(" ".join(f"{op.machine} {op.duration}" for op in job.operations))
    return "\n".join(lines) + "\n"


def document_to_json(doc: InstanceDocument) -> dict[str, Any]:
    out: dict[str, Any] = {
        "name": doc.name,
        "machines": doc.instance.machines,
        "jobs": [
            {
                "operations": [[op.machine, op.duration] for op in job.operations],
                "arrival": job.arrival,
                "utility": job.utility,
            }
            for job in doc.instance.jobs
        ],
    }
    if doc.background:
        out["background"] = sorted(doc.background)
    if doc.kappa_star is not None:
        out["kappa_star"] = doc.kappa_star
    if doc.epsilon:
        out["epsilon"] = doc.epsilon
    if doc.epsilon_ratio is not None:
        out["epsilon_ratio"] = doc.epsilon_ratio
    if doc.subset is not None:
        out["subset"] = sorted(doc.subset)
    out.update(doc.extra)
    return out


def document_from_json(data: dict[str, Any]) -> InstanceDocument:
    jobs = []
    for j, item in enumerate(data["jobs"]):
        jobs.append(
            JobSpec(
                j,
                tuple(OperationSpec(int(m), int(d)) for m, d in item["operations"]),
                int(item.get("arrival", 0)),
                int(item.get("utility", 1)),
            )
        )
    instance = JobShopInstance(tuple(jobs), int(data["machines"]))
    utilities = data.get("utilities")
    if utilities is not None:
        instance = instance.with_utilities(utilities)
    problems = validate_instance(instance)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))
    known = {"name", "machines", "jobs", "background", "kappa_star", "epsilon", "epsilon_ratio", "subset", "utilities"}
    return InstanceDocument(
        instance=instance,
        name=data.get("name", "instance"),
        background=frozenset(data.get("background", ())),
        kappa_star=data.get("kappa_star"),
        epsilon=int(data.get("epsilon", 0)),
        epsilon_ratio=data.get("epsilon_ratio"),
        subset=None if data.get("subset") is None else frozenset(data["subset"]),
        extra={k: v for k, v in data.items() if k not in known},
    )


def read_document(path: str | Path) -> InstanceDocument:
    """Load a ``.json`` document or a Taillard text file.

    In Taillard files a comment line ``# optimum: N`` supplies the known
    optimal makespan.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        doc = document_from_json(json.loads(text))
        if doc.name == "instance":
            doc = replace(doc, name=path.stem)
        return doc
    kappa_star = None
    for line in text.splitlines():
        match = _OPTIMUM_COMMENT.match(line.strip())
        if match:
            kappa_star = int(match.group(1))
    return InstanceDocument(parse_taillard(text), name=path.stem, kappa_star=kappa_star)


def write_document(doc: InstanceDocument, path: str | Path) -> None:
    Path(path).write_text(json.dumps(document_to_json(doc), indent=1) + "\n")


def generate_instance(
    seed: int, jobs: int, machines: int, duration_range: tuple[int, int] = (1, 5)
) -> JobShopInstance:
    """Random instance where every job visits every machine once."""
    if jobs < 1 or machines < 1:
        raise ValueError("jobs and machines must be positive")
    low, high = duration_range
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(jobs):
        order = rng.permutation(machines)
        durations = rng.integers(low, high + 1, size=machines)
        rows.append(list(zip(order.tolist(), durations.tolist())))
    return JobShopInstance.from_rows(rows, machines)
