"""CSV output with a fixed 12-significant-digit format and an optional JSON mirror."""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

from .errors import AlignKineticsError

FLOAT_FORMAT = "{:.12g}"


class TableSchemaError(AlignKineticsError, ValueError):
    pass


class TableIOError(AlignKineticsError, OSError):
    pass


def _cell(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    try:
        f = float(value)
    except (TypeError, ValueError):
        return str(value)
    return FLOAT_FORMAT.format(f)


def _check_rows(rows, schema):
    width = len(schema)
    out = []
    for k, row in enumerate(rows):
        row = tuple(row)
        if len(row) != width:
            missing = schema[len(row)] if len(row) < width else f"<extra column {len(row)}>"
            raise TableSchemaError(
                f"row {k} has {len(row)} values for {width} columns (mismatch at column {missing!r})"
            )
        out.append(row)
    return out


def _check_schema(schema):
    schema = tuple(schema)
    if len(set(schema)) != len(schema) or not schema:
        raise TableSchemaError("column names must be unique and non-empty")
    return schema


def _write_csv(fh, rows, schema, comment):
    if comment:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(schema)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def _json_document(rows, schema, comment) -> str:
    records = [dict(zip(schema, (_json_value(v) for v in row))) for row in rows]
    return json.dumps({"comment": comment, "columns": list(schema), "rows": records}, indent=1) + "\n"


def emit_table(
    rows: Iterable[Sequence],
    schema: Sequence[str],
    path,
    comment: str | None = None,
    json_mirror: bool = False,
) -> Path | None:
    """Write rows as CSV under a header row; lines starting with '#' are comments.

    ``path=None`` writes to stdout.  The JSON mirror goes next to the CSV
    with a ``.json`` suffix.
    """
    schema = _check_schema(schema)
    rows = _check_rows(rows, schema)
    if path is None:
        _write_csv(sys.stdout, rows, schema, comment)
        return None
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            _write_csv(fh, rows, schema, comment)
        if json_mirror:
            path.with_suffix(".json").write_text(_json_document(rows, schema, comment))
    except OSError as exc:
        raise TableIOError(f"cannot write {path}: {exc}") from exc
    return path


def emit_json(rows: Iterable[Sequence], schema: Sequence[str], path, comment: str | None = None) -> Path | None:
    """Same content as :func:`emit_table` as one JSON document."""
    schema = _check_schema(schema)
    text = _json_document(_check_rows(rows, schema), schema, comment)
    if path is None:
        sys.stdout.write(text)
        return None
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise TableIOError(f"cannot write {path}: {exc}") from exc
    return path


def _json_value(v):
    if isinstance(v, (bool, int, str)):
        return v
    try:
        f = float(FLOAT_FORMAT.format(float(v)))
    except (TypeError, ValueError):
        return str(v)
    return f if math.isfinite(f) else str(f)


def read_table(path) -> tuple[list[str], list[list]]:
    """Parse a file written by :func:`emit_table`; numeric cells become floats."""
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    except OSError as exc:
        raise TableIOError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(lines)
    header = next(reader)
    rows = []
    for raw in reader:
        row = []
        for cell in raw:
            try:
                row.append(float(cell))
            except ValueError:
                row.append(cell)
        rows.append(row)
    return header, rows


def round12(x: float) -> float:
    return float(FLOAT_FORMAT.format(x))
