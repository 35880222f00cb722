"""CSV ingestion and operator categorization for accident-narrative datasets.

Reads Socrata-style CSV exports (header row, comma delimited, double-quote
escaping) and tags every record as military / commercial / private / unknown
based on keyword rules over the operator field.
"""
from __future__ import annotations

import csv
import datetime
import io
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Iterable, TextIO


class ConfigurationError(Exception):
    """A mapped column is missing or the column map is unusable."""


class CsvParseError(Exception):
    """Structurally malformed CSV; message carries the 1-based data row."""


class OperatorCategory(Enum):
    MILITARY = "military"
    COMMERCIAL = "commercial"
    PRIVATE = "private"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ColumnMap:
    """Names of the columns holding the operator, narrative and date fields."""

    operator: str = "Operator"
    narrative: str = "Summary"
    date: str = "Date"


@dataclass(frozen=True)
class CategoryRules:
    """Case-insensitive substring rules; precedence military > private > commercial."""

    military_keywords: tuple[str, ...] = (
        "military", "air force", "navy", "army", "marine", "royal air",
    )
    private_keywords: tuple[str, ...] = ("private",)

    def __post_init__(self):
        if not self.military_keywords or not self.private_keywords:
            raise ValueError("keyword lists must be non-empty")
        for kw in (*self.military_keywords, *self.private_keywords):
            if kw != kw.lower():
                raise ValueError(f"keywords must be lowercase: {kw!r}")


@dataclass(frozen=True)
class AccidentRecord:
    record_id: int
    date: datetime.date | None
    operator_raw: str
    narrative: str
    category: OperatorCategory = OperatorCategory.UNKNOWN


_DATE_FORMATS = ("%m/%d/%Y", "%Y-%m-%d", "%d/%m/%Y", "%m/%d/%y")


def _parse_date(text: str) -> datetime.date | None:
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return datetime.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    return None


def _open_text(source: str | Path | bytes | BinaryIO | TextIO) -> TextIO:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_records(
    source: str | Path | bytes | BinaryIO | TextIO,
    column_map: ColumnMap = ColumnMap(),
) -> list[AccidentRecord]:
    """Parse a CSV source into AccidentRecords, one per data row, order kept.

    Unparseable dates are kept absent rather than rejected. Rows whose field
    count differs from the header raise CsvParseError with the 1-based data
    row number. Missing mapped columns raise ConfigurationError naming the
    column. Categories are left at UNKNOWN; see categorize_records.
    """
    stream = _open_text(source)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("input has no header row") from None

    indices = {}
    for role, name in (
        ("operator", column_map.operator),
        ("narrative", column_map.narrative),
        ("date", column_map.date),
    ):
        if name not in header:
            raise ConfigurationError(f"mapped {role} column {name!r} not in header")
        indices[role] = header.index(name)

    records = []
    for row_num, row in enumerate(reader, start=1):
        if len(row) != len(header):
            raise CsvParseError(
                f"data row {row_num}: expected {len(header)} fields, got {len(row)}"
            )
        records.append(
            AccidentRecord(
                record_id=row_num - 1,
                date=_parse_date(row[indices["date"]]),
                operator_raw=row[indices["operator"]],
                narrative=row[indices["narrative"]],
            )
        )
    return records


def records_to_csv(
    records: Iterable[AccidentRecord],
    stream: TextIO,
    column_map: ColumnMap = ColumnMap(),
) -> None:
    """Write records back to CSV so that re-parsing yields the same field values.

    Dates are written in ISO form (parseable by parse_records); absent dates
    become empty cells.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([column_map.date, column_map.operator, column_map.narrative])
    for rec in records:
        writer.writerow(
            [rec.date.isoformat() if rec.date else "", rec.operator_raw, rec.narrative]
        )


def categorize_operator(operator_raw: str, rules: CategoryRules = CategoryRules()) -> OperatorCategory:
    """Classify an operator string. Total function; blank input -> UNKNOWN."""
    text = operator_raw.lower()
    if any(kw in text for kw in rules.military_keywords):
        return OperatorCategory.MILITARY
    if any(kw in text for kw in rules.private_keywords):
        return OperatorCategory.PRIVATE
    if text.strip():
        return OperatorCategory.COMMERCIAL
    return OperatorCategory.UNKNOWN


def categorize_records(
    records: Iterable[AccidentRecord], rules: CategoryRules = CategoryRules()
) -> list[AccidentRecord]:
    """Return new records with category assigned from operator_raw."""
    return [replace(r, category=categorize_operator(r.operator_raw, rules)) for r in records]


def partition_by_category(
    records: Iterable[AccidentRecord],
) -> dict[OperatorCategory, list[AccidentRecord]]:
    """Split records into one bucket per category; buckets cover the input exactly."""
    buckets: dict[OperatorCategory, list[AccidentRecord]] = {c: [] for c in OperatorCategory}
    for rec in records:
        buckets[rec.category].append(rec)
    return buckets
