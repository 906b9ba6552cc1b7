"""
Dataset Loader - Canonical anthropometric CSV ingestion

Canonical header:
    case_id,density,bodyfat,age,weight,height,neck,chest,abdomen,hip,
    thigh,knee,ankle,biceps,forearm,wrist

Units:
    metric    weight kg, height and circumferences cm
    imperial  weight lb, height in, circumferences cm (as the public
              body-fat file ships)
"""
import dataclasses
import logging
from pathlib import Path
from typing import Iterable, Literal

import pandas as pd

from config import DataConfig
from errors import ArtifactIOError, ParseError
from estimators.formulas import DENSITY_MAX, DENSITY_MIN, siri_bf
from models.records import (
    CIRCUMFERENCE_FIELDS,
    MEASUREMENT_FIELDS,
    AnthropometricRecord,
)

logger = logging.getLogger(__name__)

Units = Literal["metric", "imperial"]

LB_TO_KG = 0.45359237
IN_TO_CM = 2.54

# Anomaly thresholds
ESSENTIAL_FAT_FLOOR = 2.0      # %BF below this is not physiological for adult men
MIN_ADULT_HEIGHT_CM = 150.0
SIRI_TOLERANCE = 1.0           # recorded bodyfat vs Siri(density), %BF


def _check_units(units: str) -> None:
    if units not in ("metric", "imperial"):
        raise ParseError(f"unknown units '{units}', expected metric or imperial")


def _parse_cell(raw: str, line: int, column: str) -> float:
    text = raw.strip()
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"non-numeric value '{raw}'", row=line, column=column) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ParseError(f"non-finite value '{raw}'", row=line, column=column)
    return value


def _validate(values: dict, line: int) -> None:
    for name in ("density", "weight", "height") + CIRCUMFERENCE_FIELDS:
        if values[name] <= 0:
            raise ParseError(f"{name} must be positive, got {values[name]}", row=line, column=name)
    if not 0.0 <= values["bodyfat"] <= 75.0:
        raise ParseError(
            f"bodyfat must lie in [0, 75], got {values['bodyfat']}", row=line, column="bodyfat"
        )
    if values["age"] < 0:
        raise ParseError(f"age must be non-negative, got {values['age']}", row=line, column="age")


def record_flags(record: AnthropometricRecord) -> tuple[str, ...]:
    """Anomaly notes for one record (empty when nothing is odd)"""
    flags = []
    if record.bodyfat < ESSENTIAL_FAT_FLOOR:
        flags.append(f"bodyfat {record.bodyfat}% below essential-fat floor {ESSENTIAL_FAT_FLOOR}%")
    if record.height < MIN_ADULT_HEIGHT_CM:
        flags.append(f"height {record.height:.2f} cm below {MIN_ADULT_HEIGHT_CM} cm")
    if not DENSITY_MIN < record.density < DENSITY_MAX:
        flags.append(f"density {record.density} g/cm³ outside physiological range")
    # density > 0 is guaranteed at parse time
    siri = siri_bf(record.density, strict=False)
    if abs(siri - record.bodyfat) > SIRI_TOLERANCE:
        flags.append(f"bodyfat {record.bodyfat}% inconsistent with Siri(density) = {siri:.1f}%")
    return tuple(flags)


def find_anomalies(records: Iterable[AnthropometricRecord]) -> list[str]:
    """One warning line per anomaly, prefixed with the case id"""
    warnings = []
    for record in records:
        for flag in record.flags or record_flags(record):
            warnings.append(f"case {record.case_id}: {flag}")
    return warnings


def drop_flagged(records: Iterable[AnthropometricRecord]) -> list[AnthropometricRecord]:
    """Explicit cleaning: keep only records without anomaly flags"""
    kept = [r for r in records if not (r.flags or record_flags(r))]
    return kept


def load_csv(path: str | Path, units: Units = "metric") -> list[AnthropometricRecord]:
    """
    Parse a canonical CSV into records, in file order.

    Anomalous records are kept and carry `flags`. Missing columns,
    non-numeric cells, out-of-domain values and duplicate case ids raise
    ParseError with the file line and column.
    """
    _check_units(units)
    path = Path(path)
    if not path.is_file():
        raise ArtifactIOError(f"dataset not found: {path}")

    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise ParseError(f"{path}: missing header") from None
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ParseError(f"{path}: {e}") from None

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in DataConfig.SCHEMA if c not in frame.columns]
    if missing:
        raise ParseError(f"{path}: missing column(s) {', '.join(missing)}", row=1, column=missing[0])
    extra = [c for c in frame.columns if c not in DataConfig.SCHEMA]
    if extra:
        logger.warning(f"{path}: ignoring unknown column(s) {', '.join(extra)}")

    records: list[AnthropometricRecord] = []
    seen: set[int] = set()
    for offset, row in enumerate(frame.itertuples(index=False)):
        line = offset + 2  # header is line 1
        cells = dict(zip(frame.columns, row))

        case_value = _parse_cell(cells["case_id"], line, "case_id")
        if case_value != int(case_value) or case_value < 1:
            raise ParseError(f"case_id must be a positive integer, got '{cells['case_id']}'",
                             row=line, column="case_id")
        case_id = int(case_value)
        if case_id in seen:
            raise ParseError(f"duplicate case_id {case_id}", row=line, column="case_id")
        seen.add(case_id)

        values = {name: _parse_cell(cells[name], line, name) for name in MEASUREMENT_FIELDS}
        if units == "imperial":
            values["weight"] *= LB_TO_KG
            values["height"] *= IN_TO_CM
        _validate(values, line)

        record = AnthropometricRecord(case_id=case_id, **values)
        records.append(dataclasses.replace(record, flags=record_flags(record)))

    flagged = sum(1 for r in records if r.flags)
    logger.info(f"Loaded {len(records)} records from {path} ({units}), {flagged} flagged")
    return records


def write_csv(records: Iterable[AnthropometricRecord], path: str | Path, units: Units = "metric") -> Path:
    """Write records in the canonical schema, converting to `units`"""
    _check_units(units)
    rows = []
    for record in records:
        row = record.to_dict()
        if units == "imperial":
            row["weight"] = row["weight"] / LB_TO_KG
            row["height"] = row["height"] / IN_TO_CM
        rows.append(row)
    frame = pd.DataFrame(rows, columns=list(DataConfig.SCHEMA))
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise ArtifactIOError(f"cannot write {path}: {e}") from None
    return path
