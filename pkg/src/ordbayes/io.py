"""Reading count tables and writing reports.

CSV tables are bare count grids, one line per table row. For product-binomial
data the two columns are (successes, failures). JSON tables carry
``{"kind": ..., "counts": [[...], ...], "row_labels": [...], "col_labels": [...]}``.

Reports are written as JSON (sorted keys, full float precision; reloading and
re-serialising gives identical bytes), CSV, or Markdown (4 significant
digits, one row per training fraction).
"""

import csv
import io as _io
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .compare import ComparisonReport
from .errors import InputError
from .simulate import SimulationReport
from .tables import BinomialTable, MultinomialTable

__all__ = [
    "TableFile",
    "load_table",
    "dump_table",
    "emit_report",
    "load_report",
]

KINDS = ("binomial", "multinomial")


@dataclass(frozen=True)
class TableFile:
    kind: str
    counts: tuple
    row_labels: tuple = ()
    col_labels: tuple = ()

    def to_table(self):
        if self.kind == "binomial":
            return BinomialTable.from_counts(self.counts, self.row_labels)
        return MultinomialTable(self.counts, self.row_labels, self.col_labels)


def _validate(kind, rows, labels=((), ())):
    if kind not in KINDS:
        raise InputError(f"unknown table kind {kind!r}; choose from {KINDS}")
    tf = TableFile(kind, tuple(tuple(r) for r in rows), tuple(labels[0]), tuple(labels[1]))
    tf.to_table()  # table-type invariants
    return tf


def _parse_csv(text, kind):
    rows = []
    width = None
    for lineno, rec in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not rec or all(not f.strip() for f in rec) or rec[0].lstrip().startswith("#"):
            continue
        if width is None:
            width = len(rec)
        elif len(rec) != width:
            raise InputError(f"line {lineno}: ragged row with {len(rec)} fields, expected {width}")
        row = []
        for f in rec:
            try:
                v = int(f.strip())
            except ValueError:
                raise InputError(f"line {lineno}: {f.strip()!r} is not an integer count") from None
            if v < 0:
                raise InputError(f"line {lineno}: negative count {v}")
            row.append(v)
        rows.append(row)
    if not rows:
        raise InputError("empty table file")
    return _validate(kind, rows)


def _parse_json(text, kind):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict) or "counts" not in doc:
        raise InputError("JSON table needs a 'counts' field")
    kind = doc.get("kind", kind)
    counts = doc["counts"]
    if not isinstance(counts, list) or not counts:
        raise InputError("empty table file")
    width = None
    for i, row in enumerate(counts, start=1):
        if not isinstance(row, list):
            raise InputError(f"row {i}: expected a list of counts")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"row {i}: ragged row with {len(row)} fields, expected {width}")
        for v in row:
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"row {i}: {v!r} is not an integer count")
            if v < 0:
                raise InputError(f"row {i}: negative count {v}")
    return _validate(kind, counts, (doc.get("row_labels", ()), doc.get("col_labels", ())))


def load_table(path, fmt=None, kind=None) -> TableFile:
    """Load and validate a count table.

    Parameters
    ----------
    fmt : {"csv", "json"}, optional
        Inferred from the file suffix when omitted.
    kind : {"binomial", "multinomial"}, optional
        Required for CSV. For JSON a ``"kind"`` field in the file wins.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    text = path.read_text()
    if not text.strip():
        raise InputError("empty table file")
    if fmt == "csv":
        if kind is None:
            raise InputError("CSV tables need an explicit kind")
        return _parse_csv(text, kind)
    if fmt == "json":
        return _parse_json(text, kind)
    raise InputError(f"unsupported table format {fmt!r}; use csv or json")


def dump_table(tf: TableFile, fmt) -> str:
    if fmt == "csv":
        return "".join(",".join(str(v) for v in row) + "\n" for row in tf.counts)
    if fmt == "json":
        doc = {"kind": tf.kind, "counts": [list(r) for r in tf.counts]}
        if tf.row_labels:
            doc["row_labels"] = list(tf.row_labels)
        if tf.col_labels:
            doc["col_labels"] = list(tf.col_labels)
        return json.dumps(doc, indent=2) + "\n"
    raise InputError(f"unsupported table format {fmt!r}")


def _sig(x, digits=4):
    if x is None:
        return ""
    if x == 0 or not math.isfinite(x):
        return f"{x:g}"
    return f"{x:.{digits}g}"


def _prob_columns(report):
    cols = []
    for code in report.model_sets:
        for model in report.rows[0].probs[code]:
            cols.append((code, model))
    return cols


def _comparison_table(report: ComparisonReport, with_se):
    header = ["q", "t", "BF_e0", "BF_ce", "BF_c0"]
    cols = _prob_columns(report)
    header += [f"P({m}|{code})" for code, m in cols]
    lines = []
    for row in report.rows:
        vals = [row.q, row.t]
        for e in (row.bf_e0, row.bf_ce, row.bf_c0):
            vals.append(e)
        for code, m in cols:
            vals.append(row.probs[code][m])
        lines.append(vals)
    if with_se:
        header = header[:2] + [h2 for h in header[2:] for h2 in (h, h + "_se")]
    return header, lines


def _comparison_csv(report):
    header, lines = _comparison_table(report, with_se=True)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for vals in lines:
        out = [repr(vals[0]), " ".join(str(v) for v in vals[1]) if isinstance(vals[1], list) else vals[1]]
        for e in vals[2:]:
            out += ["", ""] if e is None else [repr(e.value), repr(e.mc_se)]
        w.writerow(out)
    return buf.getvalue()


def _md_table(header, body):
    out = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    out += ["| " + " | ".join(row) + " |" for row in body]
    return "\n".join(out) + "\n"


def _comparison_md(report):
    parts = []
    bf_rows = [
        [_sig(r.q), _sig(r.bf_e0.value), _sig(r.bf_ce and r.bf_ce.value), _sig(r.bf_c0 and r.bf_c0.value)]
        for r in report.rows
    ]
    parts.append(_md_table(["q", "BF_e0", "BF_ce", "BF_c0"], bf_rows))
    cols = _prob_columns(report)
    if cols:
        body = [[_sig(r.q)] + [_sig(r.probs[code][m].value) for code, m in cols] for r in report.rows]
        parts.append(_md_table(["q"] + [f"P({m}\\|{code})" for code, m in cols], body))
    return "\n".join(parts)


def _simulation_rows(report: SimulationReport):
    first = report.medians[repr(report.q_values[0])]
    cols = [(code, m) for code in first for m in first[code]]
    return cols, [[q] + [report.medians[repr(q)][c][m] for c, m in cols] for q in report.q_values]


def emit_report(report, fmt="json") -> bytes:
    """Serialise a :class:`ComparisonReport` or :class:`SimulationReport`."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode("utf-8")
    if isinstance(report, ComparisonReport):
        if fmt == "csv":
            return _comparison_csv(report).encode("utf-8")
        if fmt == "md":
            return _comparison_md(report).encode("utf-8")
    elif isinstance(report, SimulationReport):
        cols, rows = _simulation_rows(report)
        header = ["q"] + [f"P({m}|{code})" for code, m in cols]
        if fmt == "csv":
            buf = _io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([repr(v) for v in row])
            return buf.getvalue().encode("utf-8")
        if fmt == "md":
            header = [h.replace("|", "\\|") for h in header]
            return _md_table(header, [[_sig(v) for v in row] for row in rows]).encode("utf-8")
    else:
        raise InputError(f"cannot serialise {type(report).__name__}")
    raise InputError(f"unsupported output format {fmt!r}; use json, csv or md")


def load_report(data):
    """Inverse of ``emit_report(..., "json")``."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    doc = json.loads(data)
    if "rows" in doc:
        return ComparisonReport.from_dict(doc)
    return SimulationReport.from_dict(doc)
