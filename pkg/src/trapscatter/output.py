"""Deterministic CSV / JSON emission of result tables.

Both formats carry the same content: a metadata mapping, an ordered list of
column names and the data rows. CSV puts metadata on leading ``#key=value``
lines; JSON is a single ``{"meta", "columns", "rows"}`` object. Floats are
written with 17 significant digits so a table round-trips exactly.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = ["Table", "format_value", "parse_csv", "validate_table", "SchemaError"]

PROFILE_COLUMNS = ("theta", "phi", "D")
SWEEP_COLUMNS = ("t", "t_over_tc", "D_theta0", "D_theta90", "D_theta180")


class SchemaError(ValueError):
    """A table does not follow the output schema."""


def format_value(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise SchemaError("non-finite value in output")
        return v
    return v


@dataclass
class Table:
    meta: dict
    columns: Sequence[str]
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.rows = [tuple(r) for r in self.rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise SchemaError(f"row has {len(r)} fields, expected {len(self.columns)}")

    @classmethod
    def from_arrays(cls, meta: dict, columns: Sequence[str], *arrays) -> "Table":
        cols = np.broadcast_arrays(*(np.ravel(np.asarray(a, dtype=float)) for a in arrays))
        return cls(meta, columns, list(zip(*cols)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.meta.items():
            buf.write(f"#{key}={format_value(val)}\n")
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(format_value(v) for v in r) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        obj = {
            "meta": {k: _json_value(v) for k, v in self.meta.items()},
            "columns": list(self.columns),
            "rows": [[_json_value(v) for v in r] for r in self.rows],
        }
        return json.dumps(obj, indent=1, allow_nan=False) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise SchemaError(f"unknown format {fmt!r}")

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def _parse_field(s: str):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def parse_csv(text: str) -> Table:
    """Inverse of :meth:`Table.to_csv` (numeric fields come back as numbers)."""
    meta, lines = {}, text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, sep, val = lines[i][1:].partition("=")
        if not sep:
            raise SchemaError(f"bad metadata line {lines[i]!r}")
        meta[key] = _parse_field(val)
        i += 1
    if i == len(lines):
        raise SchemaError("missing column header")
    columns = lines[i].split(",")
    rows = [tuple(_parse_field(f) for f in line.split(",")) for line in lines[i + 1:] if line]
    return Table(meta, columns, rows)


def validate_table(obj) -> None:
    """Check a decoded JSON object (or a :class:`Table`) against the output schema."""
    if isinstance(obj, Table):
        obj = json.loads(obj.to_json())
    if not isinstance(obj, dict) or set(obj) != {"meta", "columns", "rows"}:
        raise SchemaError("expected exactly the keys meta, columns, rows")
    if not isinstance(obj["meta"], dict) or not obj["meta"]:
        raise SchemaError("meta must be a non-empty object")
    cols = obj["columns"]
    if not isinstance(cols, list) or not cols or not all(isinstance(c, str) for c in cols):
        raise SchemaError("columns must be a non-empty list of names")
    if len(set(cols)) != len(cols):
        raise SchemaError("duplicate column names")
    if tuple(cols[:3]) == PROFILE_COLUMNS or tuple(cols) == SWEEP_COLUMNS:
        numeric = True
    else:
        numeric = False
    for r in obj["rows"]:
        if not isinstance(r, list) or len(r) != len(cols):
            raise SchemaError("row length does not match columns")
        if numeric and not all(isinstance(v, (int, float)) and math.isfinite(v) for v in r):
            raise SchemaError("numeric table holds a non-numeric or non-finite value")
