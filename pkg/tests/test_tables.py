import json

import pytest
from hypothesis import given, strategies as st

from align_kinetics.tables import TableIOError, TableSchemaError, emit_json, emit_table, read_table, round12

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_empty_rows_give_header_only(tmp_path):
    p = emit_table([], ("a", "b"), tmp_path / "t.csv")
    assert p.read_text() == "a,b\n"


def test_schema_mismatch_names_column(tmp_path):
    with pytest.raises(TableSchemaError, match="'c'"):
        emit_table([(1, 2)], ("a", "b", "c"), tmp_path / "t.csv")


def test_unwritable_path():
    with pytest.raises(TableIOError):
        emit_table([(1,)], ("a",), "/nonexistent-dir/t.csv")


@given(st.lists(st.tuples(finite, finite), max_size=20))
def test_round_trip_at_twelve_digits(tmp_path_factory, rows):
    p = tmp_path_factory.mktemp("rt") / "t.csv"
    emit_table(rows, ("x", "y"), p, comment="round trip")
    header, back = read_table(p)
    assert header == ["x", "y"]
    assert back == [[round12(a), round12(b)] for a, b in rows]


def test_comment_lines_and_mirror(tmp_path):
    p = emit_table([(1, 0.5, "lab")], ("i", "v", "s"), tmp_path / "t.csv", comment="one\ntwo", json_mirror=True)
    lines = p.read_text().splitlines()
    assert lines[:2] == ["# one", "# two"]
    doc = json.loads((tmp_path / "t.json").read_text())
    assert doc["rows"] == [{"i": 1, "v": 0.5, "s": "lab"}]


def test_json_output_is_deterministic(tmp_path):
    rows = [(0.1, 2)]
    a = emit_json(rows, ("x", "n"), tmp_path / "a.json").read_text()
    b = emit_json(rows, ("x", "n"), tmp_path / "b.json").read_text()
    assert a == b


def test_duplicate_columns_rejected(tmp_path):
    with pytest.raises(TableSchemaError):
        emit_table([], ("a", "a"), tmp_path / "t.csv")
