# decode_energy/services/datasets.py
"""
Dataset and model files

Datasets are UTF-8 CSV files with LF line endings and the exact header

    id,codec,decoder,energy_J,time_s,Ir,I1mr,ILmr,Dr,D1mr,DLmr,Dw,D1mw,DLmw

Models are JSON documents (``format_version`` 1) holding the specific
energies in joules.
"""

import csv
import json
import logging
import math
import os
import re

import pandas as pd

from decode_energy.errors import (
    DatasetFormatError,
    DecodeEnergyError,
    EmptyDatasetError,
    ModelFileError,
)
from decode_energy.models import (
    EVENT_KINDS,
    Dataset,
    EventVector,
    FeatureSet,
    MeasurementRecord,
    ModelCoefficients,
    predictor_from_name,
)
from decode_energy.utils.formatting import format_real

logger = logging.getLogger(__name__)

METADATA_COLUMNS = ["id", "codec", "decoder", "energy_J", "time_s"]
EVENT_COLUMNS = [kind.cachegrind_name for kind in EVENT_KINDS]
DATASET_HEADER = METADATA_COLUMNS + EVENT_COLUMNS

MODEL_FORMAT_VERSION = 1

INTEGER_RE = re.compile(r"^[0-9]+$")


# ============================================================================
# DATASET CSV
# ============================================================================

def _parse_real(text, column, line_number):
    try:
        value = float(text)
    except ValueError:
        raise DatasetFormatError(f"line {line_number}: {column} is not a number: {text!r}")
    if not math.isfinite(value):
        raise DatasetFormatError(f"line {line_number}: {column} is not finite: {text!r}")
    return value


def _parse_count(text, column, line_number):
    if not INTEGER_RE.match(text):
        raise DatasetFormatError(
            f"line {line_number}: {column} must be a non-negative integer, got {text!r}"
        )
    return int(text, 10)


def _row_to_record(row, line_number):
    counts = tuple(_parse_count(row[column], column, line_number) for column in EVENT_COLUMNS)
    return MeasurementRecord(
        id=row["id"],
        codec=row["codec"],
        decoder=row["decoder"],
        energy=_parse_real(row["energy_J"], "energy_J", line_number),
        decode_time=_parse_real(row["time_s"], "time_s", line_number),
        events=EventVector(counts),
    )


def load_dataset(path, allow_empty=False):
    """
    Read a dataset CSV file.

    Args:
        path: CSV file path
        allow_empty: accept a file holding only the header

    Returns:
        Dataset in file order

    Raises:
        InputError: file cannot be read
        DatasetFormatError: header or a cell is malformed
        EmptyDatasetError: no records and allow_empty is False
        ValidationError: a record violates a domain invariant
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError:
        raise DatasetFormatError(f"dataset file not found: {path}")
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(f"dataset file is empty (no header): {path}")
    except (pd.errors.ParserError, UnicodeDecodeError, OSError) as e:
        raise DatasetFormatError(f"cannot read dataset {path}: {e}")

    columns = [str(column) for column in frame.columns]
    if columns != DATASET_HEADER:
        raise DatasetFormatError(
            f"dataset header must be {','.join(DATASET_HEADER)}, got {','.join(columns)}"
        )

    records = []
    for position, row in enumerate(frame.to_dict(orient="records")):
        records.append(_row_to_record(row, position + 2))

    dataset = Dataset(tuple(records))
    if not dataset.records and not allow_empty:
        raise EmptyDatasetError(f"dataset {path} holds no records")

    logger.debug(f"Loaded {len(dataset)} records from {path}")
    return dataset


def record_to_row(record):
    return [
        record.id,
        record.codec,
        record.decoder,
        format_real(record.energy),
        format_real(record.decode_time),
    ] + [str(count) for count in record.events.counts]


def save_dataset(dataset, path):
    """Write the dataset with canonical number formatting (UTF-8, LF)."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for record in dataset:
            writer.writerow(record_to_row(record))

    logger.info(f"Wrote {len(dataset)} records to {path}")


def append_record(path, record):
    """
    Append one record to a dataset file, creating it with a header if needed.

    Raises:
        DuplicateRecordError: the id is already in the file
    """
    if os.path.exists(path) and os.path.getsize(path) > 0:
        dataset = load_dataset(path, allow_empty=True)
    else:
        dataset = Dataset()

    updated = dataset.with_record(record)
    save_dataset(updated, path)
    return updated


# ============================================================================
# MODEL FILES
# ============================================================================

def model_to_document(model):
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "feature_set": list(model.feature_set.labels),
        "coefficients": {predictor.label: value for predictor, value in model.coefficients.items()},
        "intercept": model.intercept,
        "trained_on": model.trained_on,
        "warnings": list(model.warnings),
    }


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(model_to_document(model), f, indent=2, ensure_ascii=False)
        f.write("\n")

    logger.info(f"Wrote model over {model.feature_set} to {path}")


def model_from_document(document):
    """
    Rebuild ModelCoefficients from a decoded model document.

    Raises:
        ModelFileError: unknown version or missing/invalid fields
    """
    if not isinstance(document, dict):
        raise ModelFileError("model document must be a JSON object")
    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFileError(f"unsupported model format_version {version!r}")

    try:
        feature_set = FeatureSet(tuple(predictor_from_name(name) for name in document["feature_set"]))
        coefficients = {
            predictor_from_name(label): value for label, value in document["coefficients"].items()
        }
        for label, value in document["coefficients"].items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ModelFileError(f"coefficient for {label} is not a number: {value!r}")
        return ModelCoefficients(
            feature_set=feature_set,
            coefficients=coefficients,
            trained_on=str(document.get("trained_on", "")),
            warnings=tuple(str(warning) for warning in document.get("warnings", [])),
            intercept=float(document.get("intercept", 0.0)),
        )
    except ModelFileError:
        raise
    except (KeyError, TypeError, AttributeError, ValueError, DecodeEnergyError) as e:
        raise ModelFileError(f"invalid model document: {e}")


def load_model(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except OSError as e:
        raise ModelFileError(f"cannot read model file {path}: {e}")
    except json.JSONDecodeError as e:
        raise ModelFileError(f"model file {path} is not valid JSON: {e}")

    return model_from_document(document)
