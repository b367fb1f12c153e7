"""Historical project-outcome records.

CSV ingestion and serialization, record validation, and the two per-record
inaccuracy measures. Inaccuracy follows the usual convention: actual minus
estimated, in percent of estimated, so positive cost inaccuracy is an
overrun and negative traffic inaccuracy is a shortfall. Costs are stored in
constant prices as supplied; this module never deflates, it only keeps the
``cost_unit`` label.

Parsing is all-or-nothing: a dataset with any invalid row is rejected with
every violation listed by row number.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError, IncompleteRecordError

PROJECT_TYPES = ("rail", "road", "bridge_tunnel", "other")

CSV_HEADER = (
    "id",
    "name",
    "project_type",
    "region",
    "decision_year",
    "completion_year",
    "estimated_cost",
    "actual_cost",
    "cost_unit",
    "estimated_traffic",
    "actual_traffic",
    "traffic_unit",
)


@dataclass(frozen=True)
class ProjectRecord:
    """One historical project with its forecast and (optional) outcome."""

    id: str
    name: str
    project_type: str
    region: str
    decision_year: int
    estimated_cost: float
    cost_unit: str = ""
    completion_year: int | None = None
    actual_cost: float | None = None
    estimated_traffic: float | None = None
    actual_traffic: float | None = None
    traffic_unit: str = ""

    def has_cost_outcome(self) -> bool:
        return self.actual_cost is not None

    def has_traffic_outcome(self) -> bool:
        return self.estimated_traffic is not None and self.actual_traffic is not None


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of records; safe to share across threads."""

    records: tuple[ProjectRecord, ...]
    provenance: str = ""


def validate_record(record: ProjectRecord) -> list[str]:
    """Return all invariant violations, empty if the record is valid.

    Violations are data, not errors: each entry names the offending field
    and the rule it breaks.
    """
    violations = []
    if not record.id:
        violations.append("id: must be non-empty")
    if record.project_type not in PROJECT_TYPES:
        violations.append(
            f"project_type: {record.project_type!r} not one of {PROJECT_TYPES}"
        )
    if not record.estimated_cost > 0:
        violations.append("estimated_cost: must be > 0")
    if record.actual_cost is not None and not record.actual_cost > 0:
        violations.append("actual_cost: must be > 0 when present")
    if record.estimated_traffic is not None and not record.estimated_traffic > 0:
        violations.append("estimated_traffic: must be > 0 when present")
    if record.actual_traffic is not None and not record.actual_traffic > 0:
        violations.append("actual_traffic: must be > 0 when present")
    if (
        record.completion_year is not None
        and record.completion_year < record.decision_year
    ):
        violations.append(
            "completion_year: must be >= decision_year "
            f"({record.completion_year} < {record.decision_year})"
        )
    if (record.estimated_traffic is None) != (record.actual_traffic is None):
        violations.append(
            "estimated_traffic/actual_traffic: must be present as a pair "
            "or absent as a pair"
        )
    return violations


def cost_inaccuracy(record: ProjectRecord) -> float:
    """Cost inaccuracy in percent; positive means overrun."""
    if record.actual_cost is None:
        raise IncompleteRecordError(
            f"record {record.id!r}: incomplete record, actual_cost is absent"
        )
    return 100.0 * (record.actual_cost - record.estimated_cost) / record.estimated_cost


def traffic_inaccuracy(record: ProjectRecord) -> float:
    """Traffic inaccuracy in percent; negative means shortfall."""
    if record.estimated_traffic is None or record.actual_traffic is None:
        raise IncompleteRecordError(
            f"record {record.id!r}: incomplete record, traffic fields are absent"
        )
    return (
        100.0
        * (record.actual_traffic - record.estimated_traffic)
        / record.estimated_traffic
    )


def _parse_float(text: str, row: int, field: str, errors: list[str]) -> float | None:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        errors.append(f"row {row}: {field}: not a number: {text!r}")
        return None


def _parse_int(text: str, row: int, field: str, errors: list[str]) -> int | None:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        errors.append(f"row {row}: {field}: not an integer: {text!r}")
        return None


def parse_dataset(csv_text: str, provenance: str = "") -> Dataset:
    """Parse the dataset CSV (exact header, empty string = absent field).

    All-or-nothing: raises :class:`DataError` listing every problem with its
    row number if anything is wrong.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty input: missing header") from None
    if tuple(header) != CSV_HEADER:
        raise DataError(
            f"bad header: expected {','.join(CSV_HEADER)!r}, got {','.join(header)!r}"
        )

    errors: list[str] = []
    records: list[ProjectRecord] = []
    seen_ids: dict[str, int] = {}
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(CSV_HEADER):
            errors.append(
                f"row {lineno}: expected {len(CSV_HEADER)} columns, got {len(cells)}"
            )
            continue
        (rid, name, ptype, region, dec_year, comp_year, est_cost, act_cost,
         cost_unit, est_traffic, act_traffic, traffic_unit) = cells

        decision_year = _parse_int(dec_year, lineno, "decision_year", errors)
        completion_year = _parse_int(comp_year, lineno, "completion_year", errors)
        estimated_cost = _parse_float(est_cost, lineno, "estimated_cost", errors)
        actual_cost = _parse_float(act_cost, lineno, "actual_cost", errors)
        estimated_traffic = _parse_float(est_traffic, lineno, "estimated_traffic", errors)
        actual_traffic = _parse_float(act_traffic, lineno, "actual_traffic", errors)
        if decision_year is None:
            errors.append(f"row {lineno}: decision_year: required")
            continue
        if estimated_cost is None:
            errors.append(f"row {lineno}: estimated_cost: required")
            continue

        record = ProjectRecord(
            id=rid,
            name=name,
            project_type=ptype,
            region=region,
            decision_year=decision_year,
            completion_year=completion_year,
            estimated_cost=estimated_cost,
            actual_cost=actual_cost,
            cost_unit=cost_unit,
            estimated_traffic=estimated_traffic,
            actual_traffic=actual_traffic,
            traffic_unit=traffic_unit,
        )
        for violation in validate_record(record):
            errors.append(f"row {lineno}: {violation}")
        if rid in seen_ids:
            errors.append(
                f"row {lineno}: id: duplicate {rid!r} (first seen row {seen_ids[rid]})"
            )
        else:
            seen_ids[rid] = lineno
        records.append(record)

    if errors:
        raise DataError("\n".join(errors))
    if not records:
        raise DataError("dataset has no records")
    return Dataset(records=tuple(records), provenance=provenance)


def _format_number(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    # repr of a float round-trips exactly, so serialize -> parse is the
    # identity (float() first: numpy scalars repr with a type wrapper)
    return repr(float(value))


def serialize_dataset(dataset: Dataset) -> str:
    """Serialize to the dataset CSV schema; inverse of :func:`parse_dataset`."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in dataset.records:
        writer.writerow(
            [
                r.id,
                r.name,
                r.project_type,
                r.region,
                str(r.decision_year),
                _format_number(r.completion_year),
                _format_number(r.estimated_cost),
                _format_number(r.actual_cost),
                r.cost_unit,
                _format_number(r.estimated_traffic),
                _format_number(r.actual_traffic),
                r.traffic_unit,
            ]
        )
    return out.getvalue()


def load_dataset(path: str | Path) -> Dataset:
    """Read and parse a dataset CSV from disk."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_dataset(text, provenance=str(path))
