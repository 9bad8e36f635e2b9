"""Prediction-batch I/O and compliance reporting.

Batches are comma-separated numeric files, one prediction vector per row,
optionally preceded by a single header row of column names.  Values are
written with 17 significant digits so a write/read round trip is bit-exact
for 64-bit floats.

Reports are single JSON documents (``schema_version`` 1) with per-requirement
violation counts before/after correction, per-row correction distances, and a
plan summary.  After an ``apply`` run, any nonzero after-count is an engine
bug and raises InternalGuaranteeError rather than being reported.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .cnf import clause_satisfied
from .errors import (
    EmptyFileError,
    InternalGuaranteeError,
    NonNumericCellError,
    WidthMismatchError,
)
from .reqlang import CNF, LINEAR, RequirementSet, render_clause, render_inequality

DEFAULT_TOLERANCE = 1e-9
SCHEMA_VERSION = 1


@dataclass
class PredictionBatch:
    rows: list[list[float]]
    names: list[str] | None = None

    @property
    def width(self) -> int:
        if self.rows:
            return len(self.rows[0])
        return len(self.names) if self.names else 0

    def __len__(self) -> int:
        return len(self.rows)


def read_batch(path: str | os.PathLike, expected_width: int | None = None) -> PredictionBatch:
    """Read a CSV prediction batch.

    The first row is taken as a header when any of its cells fails to parse
    as a number.  Raises EmptyFileError, WidthMismatchError (with the 1-based
    file line), or NonNumericCellError (line and 1-based column).
    """
    with open(path, encoding="utf-8") as handle:
        text = handle.read()

    names: list[str] | None = None
    rows: list[list[float]] = []
    width: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        cells = [c.strip() for c in raw.split(",")]
        if width is None:
            width = len(cells)
            if expected_width is not None and width != expected_width:
                raise WidthMismatchError(lineno, expected_width, width)
            if _looks_like_header(cells):
                names = cells
            else:
                rows.append(_parse_row(cells, lineno))
            continue
        if len(cells) != width:
            raise WidthMismatchError(lineno, width, len(cells))
        rows.append(_parse_row(cells, lineno))

    if width is None:
        raise EmptyFileError(f"{path}: no rows")
    return PredictionBatch(rows, names)


def _looks_like_header(cells: list[str]) -> bool:
    try:
        for c in cells:
            float(c)
    except ValueError:
        return True
    return False


def _parse_row(cells: list[str], lineno: int) -> list[float]:
    values = []
    for col, cell in enumerate(cells, start=1):
        try:
            v = float(cell)
        except ValueError:
            raise NonNumericCellError(lineno, col, cell) from None
        if not math.isfinite(v):
            raise NonNumericCellError(lineno, col, cell)
        values.append(v)
    return values


def write_batch(batch: PredictionBatch, path: str | os.PathLike) -> None:
    """Write a batch with 17-significant-digit cells (round-trip exact)."""
    lines = []
    if batch.names is not None:
        lines.append(",".join(batch.names))
    for row in batch.rows:
        lines.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + ("\n" if lines else ""))


# ---------------------------------------------------------------------------
# violation counting


def _inequality_violated(ineq, row, tolerance: float) -> bool:
    for canon in ineq.canonical():
        slack = -canon.rhs
        for v, c in canon.terms:
            slack += c * row[v]
        if slack < -tolerance:
            return True
    return False


def count_violations(
    rs: RequirementSet, batch: PredictionBatch, tolerance: float = DEFAULT_TOLERANCE
) -> list[int]:
    """Per-requirement violation counts over the batch rows.

    CNF clauses are judged under the degree convention (a literal holds iff
    its degree >= 0.5); inequalities within ``tolerance`` slack, strict
    relations treated as non-strict for counting.
    """
    if rs.dialect == CNF:
        reqs = rs.clauses
        counts = [0] * len(reqs)
        for row in batch.rows:
            for i, clause in enumerate(reqs):
                if not clause_satisfied(clause, row):
                    counts[i] += 1
        return counts
    if rs.dialect == LINEAR:
        reqs = rs.inequalities
        counts = [0] * len(reqs)
        for row in batch.rows:
            for i, ineq in enumerate(reqs):
                if _inequality_violated(ineq, row, tolerance):
                    counts[i] += 1
        return counts
    return []


def row_violations(rs: RequirementSet, row, tolerance: float = DEFAULT_TOLERANCE) -> int:
    """Number of requirements a single row violates."""
    if rs.dialect == CNF:
        return sum(0 if clause_satisfied(c, row) else 1 for c in rs.clauses)
    if rs.dialect == LINEAR:
        return sum(1 if _inequality_violated(q, row, tolerance) else 0 for q in rs.inequalities)
    return 0


# ---------------------------------------------------------------------------
# reports


@dataclass
class RequirementStat:
    index: int
    source_line: int
    text: str
    violations_before: int
    violations_after: int


@dataclass
class RowStat:
    index: int
    l1: float
    linf: float
    changed: int


@dataclass
class CorrectionReport:
    mode: str  # "apply" or "check"
    plan_summary: dict
    requirements: list[RequirementStat]
    rows: list[RowStat]
    total_rows: int
    rows_already_compliant: int
    rows_corrected: int
    tolerance: float
    schema_version: int = SCHEMA_VERSION

    @property
    def total_violations_before(self) -> int:
        return sum(r.violations_before for r in self.requirements)

    @property
    def total_violations_after(self) -> int:
        return sum(r.violations_after for r in self.requirements)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "mode": self.mode,
            "plan": self.plan_summary,
            "tolerance": self.tolerance,
            "totals": {
                "rows": self.total_rows,
                "rows_already_compliant": self.rows_already_compliant,
                "rows_corrected": self.rows_corrected,
                "violations_before": self.total_violations_before,
                "violations_after": self.total_violations_after,
            },
            "requirements": [
                {
                    "index": r.index,
                    "source_line": r.source_line,
                    "text": r.text,
                    "violations_before": r.violations_before,
                    "violations_after": r.violations_after,
                }
                for r in self.requirements
            ],
            "rows": [
                {"index": r.index, "l1": r.l1, "linf": r.linf, "changed": r.changed}
                for r in self.rows
            ],
        }


def _requirement_texts(rs: RequirementSet) -> list[tuple[int, str]]:
    if rs.dialect == CNF:
        return [(c.source_line, render_clause(c)) for c in rs.clauses]
    if rs.dialect == LINEAR:
        return [(q.source_line, render_inequality(q)) for q in rs.inequalities]
    return []


def check_batch(
    rs: RequirementSet,
    batch: PredictionBatch,
    plan_summary: dict | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CorrectionReport:
    """Audit a batch without correcting it; after-counts equal before-counts."""
    before = count_violations(rs, batch, tolerance)
    compliant = sum(1 for row in batch.rows if row_violations(rs, row, tolerance) == 0)
    stats = [
        RequirementStat(i, line, text, before[i], before[i])
        for i, (line, text) in enumerate(_requirement_texts(rs))
    ]
    return CorrectionReport(
        mode="check",
        plan_summary=plan_summary or {"dialect": rs.dialect},
        requirements=stats,
        rows=[],
        total_rows=len(batch),
        rows_already_compliant=compliant,
        rows_corrected=0,
        tolerance=tolerance,
    )


def build_report(
    rs: RequirementSet,
    plan_summary: dict,
    before: PredictionBatch,
    after: PredictionBatch,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CorrectionReport:
    """Build the audit report for a correction run.

    Raises InternalGuaranteeError if any requirement still counts violations
    on the corrected batch: that is an engine bug, never a report outcome.
    """
    counts_before = count_violations(rs, before, tolerance)
    counts_after = count_violations(rs, after, tolerance)
    texts = _requirement_texts(rs)
    stats = [
        RequirementStat(i, line, text, counts_before[i], counts_after[i])
        for i, (line, text) in enumerate(texts)
    ]
    bad = [s for s in stats if s.violations_after > 0]
    if bad:
        raise InternalGuaranteeError(
            "corrected batch still violates "
            + ", ".join(f"requirement {s.index} (line {s.source_line})" for s in bad)
        )

    rows: list[RowStat] = []
    compliant = 0
    corrected = 0
    for i, (row_b, row_a) in enumerate(zip(before.rows, after.rows)):
        l1 = sum(abs(a - b) for a, b in zip(row_a, row_b))
        linf = max((abs(a - b) for a, b in zip(row_a, row_b)), default=0.0)
        changed = sum(1 for a, b in zip(row_a, row_b) if a != b)
        rows.append(RowStat(i, l1, linf, changed))
        if row_violations(rs, row_b, tolerance) == 0:
            compliant += 1
        if changed:
            corrected += 1
    return CorrectionReport(
        mode="apply",
        plan_summary=plan_summary,
        requirements=stats,
        rows=rows,
        total_rows=len(before),
        rows_already_compliant=compliant,
        rows_corrected=corrected,
        tolerance=tolerance,
    )


def write_report(report: CorrectionReport, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report.to_json_dict(), handle, indent=2)
        handle.write("\n")
