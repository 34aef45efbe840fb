# decode_energy/models.py
"""
Core data types shared by every other module.

All types are immutable after construction. Invariants are enforced in
``__post_init__``; corrupt inputs raise instead of being silently repaired.
"""

import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Mapping, Optional, Union

import numpy as np

from decode_energy.errors import (
    DuplicateRecordError,
    EmptyDatasetError,
    FeatureSetError,
    InvalidEventVectorError,
    InvalidRecordError,
    NumericError,
    ValidationError,
)

# Numerical slack allowed on correlation coefficients before clamping
CORRELATION_SLACK = 1e-12


# ============================================================================
# EVENT TAXONOMY
# ============================================================================

class AccessClass(Enum):
    INSTRUCTION = "I"
    DATA_READ = "R"
    DATA_WRITE = "W"


class CacheLevel(Enum):
    REFERENCE = "r"
    L1_MISS = "L1"
    LL_MISS = "LL"


class EventKind(Enum):
    """
    One of the nine processor event types.

    Definition order is the canonical order: access class major
    (I, R, W), cache level minor (reference, L1 miss, LL miss).
    """
    I_R = (AccessClass.INSTRUCTION, CacheLevel.REFERENCE)
    I_L1 = (AccessClass.INSTRUCTION, CacheLevel.L1_MISS)
    I_LL = (AccessClass.INSTRUCTION, CacheLevel.LL_MISS)
    R_R = (AccessClass.DATA_READ, CacheLevel.REFERENCE)
    R_L1 = (AccessClass.DATA_READ, CacheLevel.L1_MISS)
    R_LL = (AccessClass.DATA_READ, CacheLevel.LL_MISS)
    W_R = (AccessClass.DATA_WRITE, CacheLevel.REFERENCE)
    W_L1 = (AccessClass.DATA_WRITE, CacheLevel.L1_MISS)
    W_LL = (AccessClass.DATA_WRITE, CacheLevel.LL_MISS)

    @property
    def access_class(self):
        return self.value[0]

    @property
    def cache_level(self):
        return self.value[1]

    @property
    def label(self):
        """Short label used in reports and files, e.g. ``I_r`` or ``W_LL``."""
        return f"{self.access_class.value}_{self.cache_level.value}"

    @property
    def cachegrind_name(self):
        return CACHEGRIND_NAMES[self]

    @property
    def index(self):
        return _CANONICAL_INDEX[self]

    @classmethod
    def of(cls, access_class, cache_level):
        return cls((access_class, cache_level))


EVENT_KINDS = tuple(EventKind)
_CANONICAL_INDEX = {kind: position for position, kind in enumerate(EVENT_KINDS)}

CACHEGRIND_NAMES = {
    EventKind.I_R: "Ir",
    EventKind.I_L1: "I1mr",
    EventKind.I_LL: "ILmr",
    EventKind.R_R: "Dr",
    EventKind.R_L1: "D1mr",
    EventKind.R_LL: "DLmr",
    EventKind.W_R: "Dw",
    EventKind.W_L1: "D1mw",
    EventKind.W_LL: "DLmw",
}


class DecodeTime(Enum):
    """Sentinel predictor: the measured decoding time instead of an event count."""
    DECODE_TIME = "time"

    @property
    def label(self):
        return self.value


DECODE_TIME = DecodeTime.DECODE_TIME

Predictor = Union[EventKind, DecodeTime]

_PREDICTOR_NAMES = {kind.label: kind for kind in EVENT_KINDS}
_PREDICTOR_NAMES.update({kind.cachegrind_name: kind for kind in EVENT_KINDS})
_PREDICTOR_NAMES.update({"time": DECODE_TIME, "decode_time": DECODE_TIME, "DecodeTime": DECODE_TIME})


def predictor_from_name(name):
    """
    Resolve a predictor from its label (``I_r``), its cachegrind name (``Ir``)
    or one of the decode time aliases (``time``, ``decode_time``).

    Raises:
        FeatureSetError: if the name is unknown
    """
    predictor = _PREDICTOR_NAMES.get(str(name).strip())
    if predictor is None:
        raise FeatureSetError(f"unknown predictor '{name}'")
    return predictor


def predictor_rank(predictor):
    """Canonical sort key: event kinds in canonical order, decode time last."""
    if predictor is DECODE_TIME:
        return len(EVENT_KINDS)
    return predictor.index


# ============================================================================
# EVENT VECTORS
# ============================================================================

def _check_hierarchy(counts):
    for position, access_class in enumerate(AccessClass):
        reference, l1_miss, ll_miss = counts[3 * position:3 * position + 3]
        if not reference >= l1_miss >= ll_miss:
            raise InvalidEventVectorError(
                f"{access_class.name.lower()} events violate the cache hierarchy: "
                f"reference={reference}, L1 misses={l1_miss}, LL misses={ll_miss}",
                access_class=access_class,
            )


@dataclass(frozen=True)
class EventVector:
    """The nine processor event counts of one decoding run, in canonical order."""
    counts: tuple

    def __post_init__(self):
        counts = tuple(self.counts)
        if len(counts) != len(EVENT_KINDS):
            raise InvalidEventVectorError(
                f"expected {len(EVENT_KINDS)} event counts, got {len(counts)}"
            )

        normalized = []
        for kind, value in zip(EVENT_KINDS, counts):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidEventVectorError(
                    f"{kind.label}: count must be an integer, got {value!r}",
                    access_class=kind.access_class,
                )
            value = int(value)
            if value < 0:
                raise InvalidEventVectorError(
                    f"{kind.label}: count must be non-negative, got {value}",
                    access_class=kind.access_class,
                )
            normalized.append(value)

        _check_hierarchy(normalized)
        object.__setattr__(self, "counts", tuple(normalized))

    @classmethod
    def from_mapping(cls, mapping):
        """Build a vector from a mapping keyed by EventKind or by label."""
        resolved = {}
        for key, value in mapping.items():
            kind = key if isinstance(key, EventKind) else predictor_from_name(key)
            if kind is DECODE_TIME:
                raise InvalidEventVectorError("decode time is not an event count")
            resolved[kind] = value

        missing = [kind.label for kind in EVENT_KINDS if kind not in resolved]
        if missing:
            raise InvalidEventVectorError(f"missing event counts: {', '.join(missing)}")
        return cls(tuple(resolved[kind] for kind in EVENT_KINDS))

    @classmethod
    def zeros(cls):
        return cls((0,) * len(EVENT_KINDS))

    def __getitem__(self, kind):
        return self.counts[kind.index]

    def count(self, access_class, cache_level):
        return self[EventKind.of(access_class, cache_level)]

    def as_dict(self):
        return {kind.label: count for kind, count in zip(EVENT_KINDS, self.counts)}

    def __add__(self, other):
        if not isinstance(other, EventVector):
            return NotImplemented
        return EventVector(tuple(a + b for a, b in zip(self.counts, other.counts)))


def derive_hits(vector, access_class, level):
    """
    Hits at a cache level, derived from the miss counts.

    Args:
        vector: EventVector of one run
        access_class: AccessClass to inspect
        level: CacheLevel.L1_MISS for L1 hits (reference - L1 misses) or
               CacheLevel.LL_MISS for LL hits (L1 misses - LL misses)

    Returns:
        int: number of hits
    """
    reference = vector.count(access_class, CacheLevel.REFERENCE)
    l1_miss = vector.count(access_class, CacheLevel.L1_MISS)
    ll_miss = vector.count(access_class, CacheLevel.LL_MISS)
    _check_hierarchy_of_class(access_class, reference, l1_miss, ll_miss)

    if level is CacheLevel.L1_MISS:
        return reference - l1_miss
    if level is CacheLevel.LL_MISS:
        return l1_miss - ll_miss
    raise ValueError(f"hits are defined for the L1 and LL levels, not {level}")


def _check_hierarchy_of_class(access_class, reference, l1_miss, ll_miss):
    if not reference >= l1_miss >= ll_miss:
        raise InvalidEventVectorError(
            f"{access_class.name.lower()} events violate the cache hierarchy",
            access_class=access_class,
        )


def derive_all_hits(vector):
    """Hits for every access class at both cache levels, keyed by (class, level)."""
    return {
        (access_class, level): derive_hits(vector, access_class, level)
        for access_class in AccessClass
        for level in (CacheLevel.L1_MISS, CacheLevel.LL_MISS)
    }


# ============================================================================
# MEASUREMENTS
# ============================================================================

def _finite_non_negative(value, name, record_id):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidRecordError(f"record '{record_id}': {name} must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0:
        raise InvalidRecordError(f"record '{record_id}': {name} must be finite and >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class MeasurementRecord:
    """
    One decoded bit stream: metadata, net processing energy (joules, idle
    offset already removed), decoding time (seconds) and event counts.
    """
    id: str
    codec: str
    decoder: str
    energy: float
    decode_time: float
    events: EventVector

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise InvalidRecordError(f"record id must be a non-empty string, got {self.id!r}")
        if not isinstance(self.events, EventVector):
            raise InvalidRecordError(f"record '{self.id}': events must be an EventVector")
        object.__setattr__(self, "codec", str(self.codec))
        object.__setattr__(self, "decoder", str(self.decoder))
        object.__setattr__(self, "energy", _finite_non_negative(self.energy, "energy", self.id))
        object.__setattr__(
            self, "decode_time", _finite_non_negative(self.decode_time, "decode_time", self.id)
        )

    @property
    def group(self):
        return (self.codec, self.decoder)

    def predictor_value(self, predictor):
        if predictor is DECODE_TIME:
            return self.decode_time
        return float(self.events[predictor])


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of measurement records with pairwise distinct ids."""
    records: tuple = ()

    def __post_init__(self):
        records = tuple(self.records)
        seen = set()
        for record in records:
            if record.id in seen:
                raise DuplicateRecordError(record.id)
            seen.add(record.id)
        object.__setattr__(self, "records", records)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]

    @property
    def ids(self):
        return tuple(record.id for record in self.records)

    def energies(self):
        return np.array([record.energy for record in self.records], dtype=float)

    def require_non_empty(self, operation="this operation"):
        if not self.records:
            raise EmptyDatasetError(f"{operation} needs a non-empty dataset")
        return self

    def with_record(self, record):
        return Dataset(self.records + (record,))

    def subset(self, ids):
        wanted = set(ids)
        return Dataset(tuple(record for record in self.records if record.id in wanted))

    def groups(self):
        """Records grouped by (codec, decoder), in order of first appearance."""
        grouped = {}
        for record in self.records:
            grouped.setdefault(record.group, []).append(record)
        return {label: Dataset(tuple(records)) for label, records in grouped.items()}

    @classmethod
    def concat(cls, *datasets):
        records = []
        for dataset in datasets:
            records.extend(dataset.records)
        return cls(tuple(records))

    @cached_property
    def fingerprint(self):
        """Content hash identifying this dataset in the result cache."""
        return hashlib.sha1(repr(self.records).encode("utf-8")).hexdigest()


# ============================================================================
# FEATURE SETS AND MODELS
# ============================================================================

@dataclass(frozen=True)
class FeatureSet:
    """
    Ordered set of predictors for one linear model.

    Stored in canonical order. Decode time may not be mixed with event kinds.
    """
    kinds: tuple

    def __post_init__(self):
        kinds = tuple(self.kinds)
        if not kinds:
            raise FeatureSetError("feature set must not be empty")
        for kind in kinds:
            if not isinstance(kind, (EventKind, DecodeTime)):
                raise FeatureSetError(f"not a predictor: {kind!r}")
        if len(set(kinds)) != len(kinds):
            raise FeatureSetError(f"duplicate predictors in {[kind.label for kind in kinds]}")
        if DECODE_TIME in kinds and len(kinds) > 1:
            raise FeatureSetError("decode time cannot be mixed with event counts in one model")
        object.__setattr__(self, "kinds", tuple(sorted(kinds, key=predictor_rank)))

    @classmethod
    def of(cls, *predictors):
        return cls(tuple(predictors))

    @classmethod
    def parse(cls, text):
        """
        Parse a preset name (``1pe``, ``4pe``, ``9pe``, ``time``) or a
        comma separated list of predictor names.
        """
        text = str(text).strip()
        preset = FEATURE_PRESETS.get(text.lower())
        if preset is not None:
            return preset
        names = [name for name in text.split(",") if name.strip()]
        return cls(tuple(predictor_from_name(name) for name in names))

    def __len__(self):
        return len(self.kinds)

    def __iter__(self):
        return iter(self.kinds)

    def __contains__(self, predictor):
        return predictor in self.kinds

    @property
    def labels(self):
        return tuple(kind.label for kind in self.kinds)

    @property
    def uses_decode_time(self):
        return self.kinds == (DECODE_TIME,)

    @property
    def key(self):
        return ",".join(self.labels)

    def __str__(self):
        return "{" + ", ".join(self.labels) + "}"


ONE_PE = FeatureSet((EventKind.I_R,))
FOUR_PE = FeatureSet((EventKind.I_R, EventKind.I_LL, EventKind.W_R, EventKind.W_LL))
NINE_PE = FeatureSet(EVENT_KINDS)
TIME_MODEL = FeatureSet((DECODE_TIME,))

FEATURE_PRESETS = {
    "1pe": ONE_PE,
    "4pe": FOUR_PE,
    "9pe": NINE_PE,
    "time": TIME_MODEL,
}


@dataclass(frozen=True)
class ModelCoefficients:
    """
    Trained specific energies: joules per occurrence for event kinds,
    joules per second for decode time.
    """
    feature_set: FeatureSet
    coefficients: Mapping
    trained_on: str = ""
    warnings: tuple = ()
    intercept: float = 0.0

    def __post_init__(self):
        given = dict(self.coefficients)
        if set(given) != set(self.feature_set.kinds):
            raise FeatureSetError(
                f"coefficients {sorted(p.label for p in given)} do not match "
                f"feature set {self.feature_set}"
            )
        ordered = {}
        for predictor in self.feature_set:
            value = float(given[predictor])
            if not math.isfinite(value):
                raise NumericError(f"coefficient for {predictor.label} is not finite: {value}")
            ordered[predictor] = value
        intercept = float(self.intercept)
        if not math.isfinite(intercept):
            raise NumericError(f"intercept is not finite: {intercept}")

        object.__setattr__(self, "coefficients", ordered)
        object.__setattr__(self, "warnings", tuple(self.warnings))
        object.__setattr__(self, "intercept", intercept)

    def __getitem__(self, predictor):
        return self.coefficients[predictor]

    def vector(self):
        return np.array([self.coefficients[p] for p in self.feature_set], dtype=float)


@dataclass(frozen=True)
class CapacitanceModel:
    """Switching capacitance (farad) and supply voltage (volt)."""
    capacitance: float
    voltage: float

    def __post_init__(self):
        for name in ("capacitance", "voltage"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def energy_per_instruction(self):
        """C * V^2, joules per executed instruction."""
        return self.capacitance * self.voltage ** 2


# ============================================================================
# REPORTS
# ============================================================================

def _clamp_correlation(value, label):
    if value is None:
        return None
    value = float(value)
    if math.isnan(value) or abs(value) > 1.0 + CORRELATION_SLACK:
        raise NumericError(f"correlation for {label} outside [-1, 1]: {value}")
    return min(1.0, max(-1.0, value))


@dataclass(frozen=True)
class CorrelationReport:
    """
    Pearson coefficients between each event count and the energy.

    ``None`` marks an undefined entry (zero variance column).
    """
    entries: Mapping
    decode_time: Optional[float] = None
    n_records: int = 0

    def __post_init__(self):
        given = dict(self.entries)
        missing = [kind.label for kind in EVENT_KINDS if kind not in given]
        if missing:
            raise ValidationError(f"correlation report lacks entries for {', '.join(missing)}")
        object.__setattr__(
            self, "entries", {kind: _clamp_correlation(given[kind], kind.label) for kind in EVENT_KINDS}
        )
        object.__setattr__(self, "decode_time", _clamp_correlation(self.decode_time, "time"))

    def __getitem__(self, predictor):
        if predictor is DECODE_TIME:
            return self.decode_time
        return self.entries[predictor]

    def grid(self):
        """Rows r / L1 / LL, each holding the I, R, W columns."""
        return [
            (level, [self.entries[EventKind.of(access_class, level)] for access_class in AccessClass])
            for level in CacheLevel
        ]

    def as_dict(self):
        values = {kind.label: self.entries[kind] for kind in EVENT_KINDS}
        values[DECODE_TIME.label] = self.decode_time
        return values


@dataclass(frozen=True)
class ErrorReport:
    """Mean relative error and the per-record relative errors it averages."""
    mean_relative_error: float
    per_record: Mapping
    n_records: int

    def __post_init__(self):
        per_record = {str(key): float(value) for key, value in dict(self.per_record).items()}
        if self.n_records != len(per_record):
            raise ValidationError(
                f"error report covers {len(per_record)} records, expected {self.n_records}"
            )
        if per_record:
            mean = math.fsum(per_record.values()) / len(per_record)
            if not math.isclose(mean, self.mean_relative_error, rel_tol=1e-12, abs_tol=1e-300):
                raise NumericError(
                    f"mean relative error {self.mean_relative_error} does not match "
                    f"per-record mean {mean}"
                )
        object.__setattr__(self, "per_record", per_record)
        object.__setattr__(self, "mean_relative_error", float(self.mean_relative_error))

    @classmethod
    def from_errors(cls, record_ids, errors):
        record_ids = list(record_ids)
        errors = [float(error) for error in errors]
        mean = math.fsum(errors) / len(errors) if errors else 0.0
        return cls(
            mean_relative_error=mean,
            per_record=dict(zip(record_ids, errors)),
            n_records=len(errors),
        )

    @property
    def percent(self):
        return 100.0 * self.mean_relative_error
