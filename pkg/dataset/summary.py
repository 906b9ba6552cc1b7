"""
Cohort Summary - per-field mean ± SD (the cohort characteristics table)
"""
import logging
from typing import Sequence

import numpy as np

from dataset.loader import find_anomalies
from errors import DomainError
from models.records import MEASUREMENT_FIELDS, AnthropometricRecord, CohortSummary, FieldStats

logger = logging.getLogger(__name__)


def summarize(records: Sequence[AnthropometricRecord]) -> CohortSummary:
    """
    Mean and sample SD (n - 1) of every measurement field.

    A single record has SD 0. Anomalous records are included; their
    notes are returned in `warnings`.
    """
    if not records:
        raise DomainError("cannot summarize an empty record list")

    table = np.array(
        [[r.value(name) for name in MEASUREMENT_FIELDS] for r in records],
        dtype=np.float64,
    )
    means = table.mean(axis=0)
    if len(records) > 1:
        sds = table.std(axis=0, ddof=1)
    else:
        sds = np.zeros(len(MEASUREMENT_FIELDS))

    warnings = find_anomalies(records)
    for warning in warnings:
        logger.warning(warning)

    return CohortSummary(
        n=len(records),
        fields={
            name: FieldStats(mean=float(m), sd=float(s))
            for name, m, s in zip(MEASUREMENT_FIELDS, means, sds)
        },
        warnings=warnings,
    )
