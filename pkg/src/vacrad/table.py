"""Tabular results with a provenance header, serialized as CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

FLOAT_FMT = ".17g"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return format(v, FLOAT_FMT)
    try:
        return format(float(v), FLOAT_FMT)
    except (TypeError, ValueError):
        return str(v)


def _parse(s: str):
    if s == "":
        return ""
    try:
        return float(s)
    except ValueError:
        return s


@dataclass
class ResultTable:
    columns: list
    units: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("columns and units must have equal length")

    def append(self, row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(self.columns)}")
        self.rows.append(list(row))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    # -- CSV ---------------------------------------------------------------

    def header_lines(self) -> list[str]:
        lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(self.provenance.items())]
        lines.append("# units: " + ",".join(self.units))
        return lines

    def row_line(self, row) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_csv(self) -> str:
        out = "\n".join(self.header_lines()) + "\n"
        out += self.row_line(self.columns)
        for r in self.rows:
            out += self.row_line(r)
        return out

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        prov, units = {}, None
        body = []
        for line in text.splitlines():
            if line.startswith("# units: "):
                units = line[len("# units: "):].split(",")
            elif line.startswith("# "):
                key, _, val = line[2:].partition(": ")
                prov[key] = json.loads(val)
            elif line.strip():
                body.append(line)
        reader = list(csv.reader(body))
        if not reader:
            raise ValueError("table has no column header")
        columns = reader[0]
        if units is None:
            units = [""] * len(columns)
        rows = [[_parse(x) for x in r] for r in reader[1:]]
        return cls(columns, units, rows, prov)

    # -- JSON --------------------------------------------------------------

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            return v

        doc = {
            "columns": self.columns,
            "units": self.units,
            "provenance": self.provenance,
            "rows": [[enc(v) for v in r] for r in self.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ResultTable":
        doc = json.loads(text)

        def dec(v):
            if v in ("nan", "inf", "-inf"):
                return float(v)
            return v

        rows = [[dec(v) for v in r] for r in doc["rows"]]
        return cls(doc["columns"], doc["units"], rows, doc.get("provenance", {}))

    # -- files -------------------------------------------------------------

    def write(self, path, fmt: str = "csv"):
        text = self.to_json() if fmt == "json" else self.to_csv()
        Path(path).write_text(text)

    @classmethod
    def read(cls, path, fmt: str | None = None) -> "ResultTable":
        path = Path(path)
        fmt = fmt or ("json" if path.suffix == ".json" else "csv")
        text = path.read_text()
        return cls.from_json(text) if fmt == "json" else cls.from_csv(text)
