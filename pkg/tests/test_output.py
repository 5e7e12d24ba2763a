import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trapscatter.output import SchemaError, Table, format_value, parse_csv, validate_table


def _table():
    return Table.from_arrays({"k_as": 2.0, "label": "x", "flag": True, "n": 3, "none": None},
                             ("theta", "phi", "D"), np.linspace(0, 1, 4), 0.5, [1.0, 2.0, 3.0, 4.0])


def test_csv_layout():
    text = _table().to_csv()
    lines = text.splitlines()
    assert lines[:5] == ["#k_as=2", "#label=x", "#flag=true", "#n=3", "#none=none"]
    assert lines[5] == "theta,phi,D"
    assert len(lines) == 10


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_round_trips_floats_exactly(values):
    t = Table.from_arrays({"a": 1.0}, ("theta", "phi", "D"), values, 0.0, 0.0)
    back = parse_csv(t.to_csv())
    np.testing.assert_array_equal(back.column("theta"), np.asarray(values, dtype=float))


def test_json_schema_and_round_trip():
    obj = json.loads(_table().to_json())
    validate_table(obj)
    assert obj["columns"] == ["theta", "phi", "D"]
    assert obj["meta"]["flag"] is True
    assert obj["rows"][1][0] == pytest.approx(1 / 3)


def test_schema_violations():
    with pytest.raises(SchemaError):
        validate_table({"meta": {}, "columns": ["theta"], "rows": []})
    with pytest.raises(SchemaError):
        validate_table({"meta": {"a": 1}, "columns": ["theta", "phi", "D"], "rows": [[0, 0]]})
    with pytest.raises(SchemaError):
        validate_table({"meta": {"a": 1}, "columns": ["theta", "phi", "D"], "rows": [[0, 0, "x"]]})
    with pytest.raises(SchemaError):
        Table({"a": 1}, ("x", "y"), [(1,)])
    with pytest.raises(SchemaError):
        Table({"a": 1}, ("x",), [(math.nan,)]).to_json()


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.float64(2.0)) == "2"
    assert format_value(np.int64(7)) == "7"
    assert format_value(False) == "false"


def test_parse_csv_rejects_malformed_input():
    with pytest.raises(SchemaError):
        parse_csv("#novalue\nx\n")
    with pytest.raises(SchemaError):
        parse_csv("#a=1\n")
