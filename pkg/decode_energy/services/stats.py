# decode_energy/services/stats.py
"""
Correlation and error statistics

Pearson correlation between event counts and energy, and the mean
relative estimation error used to score every model.
"""

import logging
import math

import numpy as np

from decode_energy.errors import (
    DegenerateInputError,
    DimensionError,
    InvalidReferenceEnergyError,
)
from decode_energy.models import (
    CORRELATION_SLACK,
    DECODE_TIME,
    EVENT_KINDS,
    CorrelationReport,
    ErrorReport,
)

logger = logging.getLogger(__name__)


# 📈 Pearson correlation
def pearson(x, y):
    """
    Sample Pearson correlation coefficient.

    Two-pass (mean first, then deviations): event counts reach 1e10, where
    the one-pass sum-of-squares expansion loses most of its digits.

    Raises:
        DimensionError: lengths differ or fewer than two samples
        DegenerateInputError: either vector has zero variance
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise DimensionError(f"pearson needs two vectors of equal length, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise DimensionError(f"pearson needs at least 2 samples, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateInputError("pearson input contains non-finite values")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateInputError("pearson input has zero variance")

    dx = x - x.mean()
    dy = y - y.mean()
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    sxy = math.fsum(dx * dy)
    denominator = math.sqrt(sxx) * math.sqrt(syy)
    if denominator == 0.0:
        raise DegenerateInputError("pearson input has zero variance")

    r = sxy / denominator
    if abs(r) > 1.0 + CORRELATION_SLACK:
        logger.warning(f"Pearson coefficient {r} outside [-1, 1] beyond slack")
    # Clamp in case of floating-point error
    return min(1.0, max(-1.0, r))


def _pearson_or_none(x, y, label):
    try:
        return pearson(x, y)
    except DegenerateInputError:
        logger.info(f"Correlation for {label} is undefined (zero variance)")
        return None


# 📊 Correlation table
def correlation_report(dataset):
    """
    Pearson coefficient of every event count (and the decoding time)
    against the measured energy.

    Columns with zero variance are reported as undefined (None).

    Raises:
        DimensionError: fewer than two records
        DegenerateInputError: the energies themselves are constant
    """
    if len(dataset) < 2:
        raise DimensionError(f"correlation needs at least 2 records, got {len(dataset)}")

    energies = dataset.energies()
    if np.ptp(energies) == 0:
        raise DegenerateInputError("measured energies have zero variance")

    entries = {}
    for kind in EVENT_KINDS:
        counts = [record.predictor_value(kind) for record in dataset]
        entries[kind] = _pearson_or_none(counts, energies, kind.label)

    times = [record.predictor_value(DECODE_TIME) for record in dataset]
    return CorrelationReport(
        entries=entries,
        decode_time=_pearson_or_none(times, energies, DECODE_TIME.label),
        n_records=len(dataset),
    )


def correlation_by_group(dataset):
    """
    One correlation report per (codec, decoder) group plus the pooled set.

    Returns:
        (groups, pooled): dict (codec, decoder) -> CorrelationReport in order
        of first appearance, and the report over all records. Groups too
        small or with constant energy are left out of ``groups``.
    """
    groups = {}
    for label, group in dataset.groups().items():
        try:
            groups[label] = correlation_report(group)
        except (DimensionError, DegenerateInputError) as e:
            logger.info(f"Skipping correlation for group {label}: {e}")
    return groups, correlation_report(dataset)


# 🧮 Estimation error
def mean_relative_error(predicted, actual, record_ids=None):
    """
    Mean relative error: (1/M) * sum(|E_hat_m - E_m| / E_m).

    Args:
        predicted: estimated energies
        actual: measured energies (all strictly positive)
        record_ids: ids keying the per-record errors (default "0".."M-1")

    Returns:
        ErrorReport

    Raises:
        DimensionError: lengths differ or are zero
        InvalidReferenceEnergyError: a measured energy is not > 0
    """
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if predicted.ndim != 1 or predicted.shape != actual.shape or predicted.size == 0:
        raise DimensionError(
            f"need equally long non-empty vectors, got {predicted.shape} and {actual.shape}"
        )

    if record_ids is None:
        record_ids = [str(index) for index in range(actual.size)]
    record_ids = list(record_ids)
    if len(record_ids) != actual.size:
        raise DimensionError(f"{len(record_ids)} record ids for {actual.size} energies")

    for record_id, energy in zip(record_ids, actual):
        if not energy > 0:
            raise InvalidReferenceEnergyError(record_id, float(energy))

    errors = np.abs(predicted - actual) / actual
    return ErrorReport.from_errors(record_ids, errors.tolist())
