# decode_energy/services/energy_model.py
"""
Linear specific-energy models

    E_hat = sum over PE of n_PE * e_PE        (no intercept by default)

The event-count models (1, 4 or 9 processor events), the decoding time
model (same homogeneous fit over the decode time) and the capacitance
model E_hat = C * V^2 * c_CPU, which is the 1-PE model over I_r.
"""

import logging
import math
from dataclasses import dataclass
from numbers import Real

import numpy as np

from decode_energy.errors import (
    IncompleteInputError,
    IncompleteRecordError,
    NumericError,
    UnderdeterminedError,
    ValidationError,
)
from decode_energy.models import (
    ONE_PE,
    CapacitanceModel,
    EventKind,
    EventVector,
    MeasurementRecord,
    ModelCoefficients,
    predictor_from_name,
)
from decode_energy.services.stats import mean_relative_error

logger = logging.getLogger(__name__)


# ============================================================================
# DESIGN MATRIX AND FITTING
# ============================================================================

def build_design_matrix(dataset, feature_set):
    """
    Lay out the predictors of every record.

    Returns:
        tuple: (M x K float matrix in feature-set order, length-M energy vector)

    Raises:
        EmptyDatasetError: no records
        IncompleteRecordError: decode time selected but not > 0 for a record
    """
    dataset.require_non_empty("building a design matrix")

    rows = []
    for record in dataset:
        if feature_set.uses_decode_time and not record.decode_time > 0:
            raise IncompleteRecordError(record.id, "decode time must be > 0 when used as a predictor")
        rows.append([record.predictor_value(predictor) for predictor in feature_set])

    matrix = np.array(rows, dtype=float).reshape(len(dataset), len(feature_set))
    return matrix, dataset.energies()


def _solve_scaled(matrix, target):
    """
    Least squares via numpy's orthogonal (SVD based) solver on a column
    scaled matrix. Columns span ~1e4..1e10, so scaling is required for
    conditioning. Rank deficient systems are re-solved with the
    pseudo-inverse of the unscaled matrix, which gives the minimum-norm
    solution in joules per event.
    """
    scale = np.max(np.abs(matrix), axis=0)
    scale[scale == 0] = 1.0
    solution, _, rank, _ = np.linalg.lstsq(matrix / scale, target, rcond=None)
    rank = int(rank)
    if rank < matrix.shape[1]:
        return np.linalg.pinv(matrix) @ target, rank
    return solution / scale, rank


def fit_least_squares(dataset, feature_set, fit_intercept=False, trained_on=None, log_warnings=True):
    """
    Fit the specific energies minimising sum((E_hat_m - E_m)^2).

    Args:
        dataset: training records
        feature_set: predictors of the model
        fit_intercept: add a constant term (off: idle offset is removed upstream)
        trained_on: provenance descriptor stored on the model
        log_warnings: log fit warnings at WARNING (DEBUG otherwise)

    Returns:
        ModelCoefficients; rank deficiency and negative coefficients are
        reported in ``warnings`` and logged

    Raises:
        UnderdeterminedError: fewer records than coefficients
        NumericError: non-finite design matrix, target or solution
    """
    matrix, target = build_design_matrix(dataset, feature_set)
    n_records, n_features = matrix.shape
    n_params = n_features + (1 if fit_intercept else 0)

    if n_records < n_params:
        raise UnderdeterminedError(
            f"{n_records} records cannot determine {n_params} coefficients for {feature_set}"
        )
    if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(target))):
        raise NumericError("design matrix or energies contain non-finite values")

    if fit_intercept:
        matrix = np.column_stack([matrix, np.ones(n_records)])

    solution, rank = _solve_scaled(matrix, target)
    if not np.all(np.isfinite(solution)):
        raise NumericError(f"least squares solution is not finite: {solution}")

    warnings = []
    if rank < n_params:
        warnings.append(
            f"design matrix is rank deficient (rank {rank} < {n_params}); "
            f"minimum-norm solution returned"
        )
    for predictor, value in zip(feature_set, solution[:n_features]):
        if value < 0:
            warnings.append(f"negative specific energy for {predictor.label}: {value:.6g}")
    log = logger.warning if log_warnings else logger.debug
    for warning in warnings:
        log(f"Fit {feature_set}: {warning}")

    if trained_on is None:
        trained_on = f"{n_records} records ({dataset.fingerprint[:12]})"

    return ModelCoefficients(
        feature_set=feature_set,
        coefficients=dict(zip(feature_set, solution[:n_features].tolist())),
        trained_on=trained_on,
        warnings=tuple(warnings),
        intercept=float(solution[n_features]) if fit_intercept else 0.0,
    )


# ============================================================================
# PREDICTION
# ============================================================================

def _resolve_inputs(feature_set, features):
    if isinstance(features, MeasurementRecord):
        return [features.predictor_value(predictor) for predictor in feature_set]

    if isinstance(features, EventVector):
        if feature_set.uses_decode_time:
            raise IncompleteInputError("the decode time model needs a decode time, not event counts")
        return [float(features[predictor]) for predictor in feature_set]

    if isinstance(features, Real):
        if not feature_set.uses_decode_time:
            raise IncompleteInputError(f"model over {feature_set} needs event counts, not a decode time")
        return [float(features)]

    if isinstance(features, dict):
        resolved = {
            key if not isinstance(key, str) else predictor_from_name(key): value
            for key, value in features.items()
        }
        missing = [predictor.label for predictor in feature_set if predictor not in resolved]
        if missing:
            raise IncompleteInputError(f"missing model inputs: {', '.join(missing)}")
        return [float(resolved[predictor]) for predictor in feature_set]

    raise IncompleteInputError(f"cannot predict from {type(features).__name__}")


def predict(model, features):
    """
    Estimated energy in joules: dot product of inputs and specific energies.

    Args:
        model: ModelCoefficients
        features: EventVector, MeasurementRecord, decode time (seconds) or
                  a mapping predictor/label -> value

    Raises:
        IncompleteInputError: an input the model needs is not available
    """
    values = np.array(_resolve_inputs(model.feature_set, features), dtype=float)
    energy = float(np.dot(values, model.vector())) + model.intercept
    if not math.isfinite(energy):
        raise NumericError(f"prediction is not finite: {energy}")
    return energy


def predict_dataset(model, dataset):
    return np.array([predict(model, record) for record in dataset], dtype=float)


def residuals(model, dataset):
    """Measured minus estimated energy for every record."""
    return dataset.energies() - predict_dataset(model, dataset)


@dataclass(frozen=True)
class TrainingFit:
    model: ModelCoefficients
    rms_residual: float
    report: object


def training_error(dataset, feature_set):
    """In-sample fit: model, root-mean-square residual and relative error report."""
    model = fit_least_squares(dataset, feature_set)
    predicted = predict_dataset(model, dataset)
    residual = dataset.energies() - predicted
    rms = math.sqrt(math.fsum(residual * residual) / len(dataset))
    report = mean_relative_error(predicted, dataset.energies(), dataset.ids)
    return TrainingFit(model=model, rms_residual=rms, report=report)


# ============================================================================
# CAPACITANCE MODEL
# ============================================================================

def capacitance_energy(model, c_cpu):
    """E_hat = C * V^2 * c_CPU."""
    if c_cpu < 0:
        raise ValidationError(f"instruction count must be >= 0, got {c_cpu}")
    return model.capacitance * model.voltage ** 2 * c_cpu


def capacitance_equivalence(dataset):
    """
    Fit the 1-PE instruction model and read its coefficient as C * V^2.

    Returns:
        tuple: (ModelCoefficients over {I_r}, implied C * V^2 in J per instruction)
    """
    model = fit_least_squares(dataset, ONE_PE)
    return model, model[EventKind.I_R]


def implied_capacitance(cv2, voltage):
    """Switching capacitance C = (C * V^2) / V^2 at the given supply voltage."""
    if not voltage > 0:
        raise ValidationError(f"voltage must be > 0, got {voltage}")
    if not cv2 > 0:
        raise ValidationError(f"implied C*V^2 must be > 0 to derive a capacitance, got {cv2}")
    return CapacitanceModel(capacitance=cv2 / voltage ** 2, voltage=voltage)

