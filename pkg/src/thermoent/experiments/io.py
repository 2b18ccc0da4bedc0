"""Deterministic CSV/JSON serialization of run and sweep tables.

Floats are written with 17 significant digits in scientific notation and
files use LF line endings, so identical configurations produce bitwise
identical output across platforms. The CSV carries its full resolved
configuration in a '#'-prefixed JSON header line.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .runner import RunResult, SweepResult


def format_float(x: float) -> str:
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    return f"{float(x):.16e}"


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def _metadata_line(metadata: dict) -> str:
    return "# " + json.dumps(metadata, sort_keys=True, separators=(",", ":"))


def _table_csv(header: list[str], rows, metadata: dict) -> str:
    buf = io.StringIO()
    buf.write(_metadata_line(metadata))
    buf.write("\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(v) for v in row])
    return buf.getvalue()


def run_to_csv(result: RunResult) -> str:
    header = ["tau"] + result.column_names
    cols = [result.times] + [result.columns[name] for name in result.column_names]
    rows = zip(*cols)
    return _table_csv(header, rows, result.metadata)


def sweep_to_csv(result: SweepResult) -> str:
    header = list(result.columns)
    rows = zip(*[result.columns[name] for name in header])
    return _table_csv(header, rows, result.metadata)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [float(v) for v in value]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def run_to_json(result: RunResult) -> str:
    doc = {
        "metadata": result.metadata,
        "columns": {"tau": _jsonable(result.times),
                    **{k: _jsonable(v) for k, v in result.columns.items()}},
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def sweep_to_json(result: SweepResult) -> str:
    doc = {
        "metadata": result.metadata,
        "columns": {k: _jsonable(v) for k, v in result.columns.items()},
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def gnuplot_script(csv_path: str, columns: list[str], x_column: str = "tau") -> str:
    """Companion plotting script referencing the CSV columns by position."""
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x_column}'",
        "set grid",
    ]
    plots = [f"'{csv_path}' using 1:{i + 2} with lines" for i in range(len(columns))]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
