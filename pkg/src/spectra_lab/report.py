"""Run reports shared by the command-line front end.

A :class:`RunReport` carries the command echo, the parameters it ran with, a
JSON-ready results payload and an optional table for CSV output.  Floats are
written at 12 significant digits and keys are sorted, so two runs with the
same arguments produce byte-identical JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Sequence

import numpy as np

SCHEMA_VERSION = "1.0"
DIGITS = 12
STATUSES = ("ok", "warn", "fail")


def round_sig(x: float, digits: int = DIGITS) -> float | None:
    """``x`` rounded to ``digits`` significant digits; non-finite values become ``None``."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


def clean(obj: Any, digits: int = DIGITS) -> Any:
    """Recursively convert numpy and complex values into rounded JSON types."""
    if isinstance(obj, dict):
        return {str(k): clean(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": round_sig(obj.real, digits), "im": round_sig(obj.imag, digits)}
    if isinstance(obj, (float, np.floating)):
        return round_sig(obj, digits)
    return obj


def format_cell(v: Any, digits: int = DIGITS) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{digits}g}"
    return "" if v is None else str(v)


@dataclass
class Table:
    """Rows for CSV output plus ``#`` comment lines describing the columns."""

    columns: Sequence[str]
    rows: list = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.comments:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        return buf.getvalue()


@dataclass
class RunReport:
    command: list[str]
    parameters: dict
    results: dict
    status: str = "ok"
    timing: dict | None = None
    table: Table | None = None
    messages: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "command": list(self.command),
            "parameters": clean(self.parameters),
            "results": clean(self.results),
            "status": self.status,
            "messages": list(self.messages),
        }
        if self.timing is not None:
            out["timing"] = clean(self.timing)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        table = self.table or Table(["key", "value"], _flatten(self.to_dict()["results"]))
        head = [f"command: {' '.join(self.command)}", f"status: {self.status}"]
        return Table(table.columns, table.rows, head + table.comments).to_csv()


def _flatten(d: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(d, dict):
        rows = []
        for k in sorted(d):
            rows += _flatten(d[k], f"{prefix}.{k}" if prefix else str(k))
        return rows
    if isinstance(d, list):
        return [(prefix, json.dumps(d))]
    return [(prefix, d)]


def load_schema() -> dict:
    """The JSON schema shipped with the package."""
    text = resources.files("spectra_lab").joinpath("report.schema.json").read_text()
    return json.loads(text)


__all__ = ["DIGITS", "SCHEMA_VERSION", "RunReport", "Table", "clean", "format_cell",
           "load_schema", "round_sig"]
