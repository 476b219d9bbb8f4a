import json

import pytest
from hypothesis import given, settings, strategies as st

from jobsetdiag import (
    InstanceDocument,
    JobShopInstance,
    TaillardParseError,
    document_from_json,
    document_to_json,
    generate_instance,
    parse_taillard,
    read_document,
    serialize_taillard,
    validate_instance,
    write_document,
)


def test_parse_small():
    inst = parse_taillard("2 2\n0 2 1 3\n1 2 0 1\n")
    assert inst.n_jobs == 2 and inst.machines == 2
    assert [(op.machine, op.duration) for op in inst.jobs[0].operations] == [(0, 2), (1, 3)]
    assert inst.jobs[1].arrival == 0 and inst.jobs[1].utility == 1


def test_comments_and_blank_lines_skipped():
    inst = parse_taillard("# hello\n\n2 1\n# mid\n0 4\n\n0 5\n")
    assert [job.operations[0].duration for job in inst.jobs] == [4, 5]


@pytest.mark.parametrize(
    "text, line, needle",
    [
        ("2 2\n0 2 1 3 0 1\n1 2 0 1\n", 2, "pairs"),
        ("2 2\n0 2 1 3\n1 2 7 1\n", 3, "machine id 7"),
        ("2 2\n0 2 1 x\n1 2 0 1\n", 2, "integer"),
        ("2 2 2\n", 1, "header"),
        ("2 2\n0 2 1 3\n", 2, "expected 2 job lines"),
        ("1 1\n0 1\n0 1\n", 3, "more than"),
        ("", 1, "missing"),
        ("1 1\n0 0\n", 2, "positive"),
    ],
)
def test_parse_errors_name_the_line(text, line, needle):
    with pytest.raises(TaillardParseError) as info:
        parse_taillard(text)
    assert info.value.line == line
    assert needle in str(info.value)


def test_column_reported():
    with pytest.raises(TaillardParseError) as info:
        parse_taillard("1 2\n0 2 9 1\n")
    assert info.value.column == 5


def test_ta71(data_dir):
    doc = read_document(data_dir / "ta71.txt")
    assert (doc.instance.n_jobs, doc.instance.machines, doc.instance.n_operations) == (100, 20, 2000)
    assert doc.kappa_star == 5464
    assert doc.name == "ta71"
    assert validate_instance(doc.instance) == []


def test_ft06(data_dir):
    doc = read_document(data_dir / "ft06.txt")
    assert doc.instance.n_operations == 36 and doc.kappa_star == 55


def test_generate_deterministic():
    a = generate_instance(1, 4, 3)
    assert a == generate_instance(1, 4, 3)
    assert validate_instance(a) == []
    for job in a.jobs:
        assert sorted(op.machine for op in job.operations) == [0, 1, 2]
        assert all(1 <= op.duration <= 5 for op in job.operations)
    with pytest.raises(ValueError):
        generate_instance(1, 0, 3)


def test_generate_duration_range():
    inst = generate_instance(5, 10, 4, (7, 9))
    assert {op.duration for job in inst.jobs for op in job.operations} <= {7, 8, 9}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 8))
def test_taillard_round_trip(seed, jobs, machines):
    inst = generate_instance(seed, jobs, machines)
    assert parse_taillard(serialize_taillard(inst, ["note"])) == inst


def test_serialize_rejects_partial_routes():
    inst = JobShopInstance.from_rows([[(0, 1)]], 2)
    with pytest.raises(ValueError):
        serialize_taillard(inst)


def test_json_round_trip(tmp_path, example):
    doc = InstanceDocument(
        example.with_utilities([2, 3, 1, 4]), "ex", frozenset({3}), 9, epsilon=1, extra={"note": "x"}
    )
    path = tmp_path / "ex.json"
    write_document(doc, path)
    again = read_document(path)
    assert again == doc
    assert again.instance.utilities() == [2, 3, 1, 4]
    assert again.extra == {"note": "x"}


def test_json_top_level_utilities(example):
    data = document_to_json(InstanceDocument(example))
    data["utilities"] = [5, 5, 5, 1]
    assert document_from_json(data).instance.utilities() == [5, 5, 5, 1]
    data["utilities"] = [1]
    with pytest.raises(ValueError):
        document_from_json(data)


def test_json_rejects_invalid(example):
    data = document_to_json(InstanceDocument(example))
    data["jobs"][0]["operations"][0] = [9, 1]
    with pytest.raises(ValueError):
        document_from_json(json.loads(json.dumps(data)))


def test_json_name_defaults_to_stem(tmp_path, example):
    path = tmp_path / "shop.json"
    path.write_text(json.dumps({k: v for k, v in document_to_json(InstanceDocument(example)).items() if k != "name"}))
    assert read_document(path).name == "shop"
