# decode_energy/services/validation.py
"""
Cross validation and model selection

Seeded k-fold plans, pooled cross-validated error (one mean relative
error over all held-out records), exhaustive event subset search and the
per-decoder model comparison table.

Cross validation results are cached (see extensions.cache) keyed by the
dataset fingerprint, the feature set and the fold plan.
"""

import hashlib
import itertools
import logging
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from decode_energy.errors import (
    EmptyDatasetError,
    FeatureSetError,
    FoldCountError,
    ModelingError,
    UnderdeterminedError,
    ValidationError,
)
from decode_energy.extensions import get_cache
from decode_energy.models import (
    EVENT_KINDS,
    FOUR_PE,
    NINE_PE,
    ONE_PE,
    TIME_MODEL,
    Dataset,
    ErrorReport,
    FeatureSet,
)
from decode_energy.services.energy_model import build_design_matrix, fit_least_squares, predict
from decode_energy.services.stats import mean_relative_error

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

# Columns of the comparison table, in display order
COMPARISON_MODELS = (
    ("1 PE", ONE_PE),
    ("4 PE", FOUR_PE),
    ("9 PE", NINE_PE),
    ("time", TIME_MODEL),
)

POOLED_LABEL = "All"


# ============================================================================
# FOLD PLANS
# ============================================================================

@dataclass(frozen=True)
class FoldPlan:
    """Assignment of record ids to folds 0..k-1 (ids kept in dataset order)."""
    k: int
    seed: int
    assignment: Mapping

    def __post_init__(self):
        if self.k < 2:
            raise FoldCountError(f"a fold plan needs k >= 2, got {self.k}")
        assignment = dict(self.assignment)
        for record_id, fold in assignment.items():
            if not 0 <= fold < self.k:
                raise FoldCountError(f"record '{record_id}' assigned to fold {fold} outside [0, {self.k})")
        object.__setattr__(self, "assignment", assignment)
        sizes = self.fold_sizes()
        if max(sizes) - min(sizes) > 1:
            raise FoldCountError(f"fold sizes must differ by at most 1, got {sizes}")

    def folds(self):
        """Record ids of each fold, fold 0 first."""
        folds = [[] for _ in range(self.k)]
        for record_id, fold in self.assignment.items():
            folds[fold].append(record_id)
        return folds

    def fold_sizes(self):
        return [len(fold) for fold in self.folds()]

    @property
    def key(self):
        digest = hashlib.sha1(repr((self.k, self.seed, tuple(self.assignment.items()))).encode("utf-8"))
        return digest.hexdigest()


def make_folds(dataset, k, seed):
    """
    Shuffle the records with a PCG64 generator seeded by ``seed`` (reduced
    to 64 bits) and deal them round-robin into k folds.

    Raises:
        FoldCountError: k outside [2, M]
    """
    n_records = len(dataset)
    if not 2 <= k <= n_records:
        raise FoldCountError(f"fold count k={k} must lie in [2, {n_records}]")

    rng = np.random.Generator(np.random.PCG64(int(seed) & MASK64))
    order = rng.permutation(n_records)

    ids = dataset.ids
    folds = {}
    for position, index in enumerate(order):
        folds[ids[index]] = position % k

    logger.debug(f"Made {k} folds over {n_records} records with seed {seed}")
    return FoldPlan(k=k, seed=int(seed), assignment={rid: folds[rid] for rid in ids})


# ============================================================================
# CROSS VALIDATION
# ============================================================================

def _cache_key(dataset, feature_set, plan, fit_intercept):
    return f"cv:{dataset.fingerprint}:{feature_set.key}:{plan.key}:{int(fit_intercept)}"


def cross_validate(dataset, feature_set, plan, fit_intercept=False):
    """
    Fit on each fold's complement, predict the held-out records and pool
    every held-out relative error into one mean relative error.

    Returns:
        ErrorReport over all M records

    Raises:
        ValidationError: the plan does not cover exactly the dataset's ids
        UnderdeterminedError: a fold's complement is too small (names the fold)
    """
    dataset.require_non_empty("cross validation")
    if set(plan.assignment) != set(dataset.ids):
        raise ValidationError("fold plan does not cover exactly the records of the dataset")

    cache = get_cache()
    key = _cache_key(dataset, feature_set, plan, fit_intercept)
    cached = cache.get(key)
    if cached is not None:
        return cached

    # Validates every record for the selected predictors up front
    build_design_matrix(dataset, feature_set)

    predicted = {}
    for fold_index, held_out in enumerate(plan.folds()):
        if not held_out:
            continue
        held = set(held_out)
        training = Dataset(tuple(record for record in dataset if record.id not in held))
        try:
            model = fit_least_squares(
                training,
                feature_set,
                fit_intercept=fit_intercept,
                trained_on=f"complement of fold {fold_index}",
                log_warnings=False,
            )
        except (UnderdeterminedError, EmptyDatasetError) as e:
            raise UnderdeterminedError(f"fold {fold_index} cannot be trained: {e}") from e

        for record in dataset.subset(held):
            predicted[record.id] = predict(model, record)

    report = mean_relative_error(
        [predicted[record_id] for record_id in dataset.ids],
        dataset.energies(),
        dataset.ids,
    )
    cache.set(key, report)
    return report


def invalidate_validation_cache():
    """Clear all cached cross validation results"""
    get_cache().clear()


# ============================================================================
# SUBSET SELECTION
# ============================================================================

@dataclass(frozen=True)
class SubsetSelection:
    feature_set: FeatureSet
    report: ErrorReport
    ranking: tuple  # (FeatureSet, ErrorReport) pairs, ascending error


def select_subset(dataset, size, plan):
    """
    Cross validate every event subset of the given size on the same plan.

    Candidates are generated in canonical lexicographic order and sorted
    stably by error, so ties keep the lexicographically first subset.

    Returns:
        SubsetSelection with the winner and the full ranking
    """
    if not 1 <= size <= len(EVENT_KINDS):
        raise FeatureSetError(f"subset size must lie in [1, {len(EVENT_KINDS)}], got {size}")

    candidates = [FeatureSet(kinds) for kinds in itertools.combinations(EVENT_KINDS, size)]
    logger.info(f"Evaluating {len(candidates)} subsets of size {size}")

    results = [(candidate, cross_validate(dataset, candidate, plan)) for candidate in candidates]
    ranking = tuple(sorted(results, key=lambda item: item[1].mean_relative_error))

    best_set, best_report = ranking[0]
    logger.info(f"Best subset {best_set}: {best_report.percent:.2f}%")
    return SubsetSelection(feature_set=best_set, report=best_report, ranking=ranking)


# ============================================================================
# MODEL COMPARISON
# ============================================================================

@dataclass(frozen=True)
class ComparisonRow:
    label: str
    codec: Optional[str]
    decoder: Optional[str]
    n_records: int
    cells: Mapping  # column name -> ErrorReport, or None when unavailable


@dataclass(frozen=True)
class ComparisonTable:
    columns: tuple
    group_rows: tuple
    pooled_row: ComparisonRow

    @property
    def rows(self):
        """Group rows in order of first appearance, pooled row last."""
        return self.group_rows + (self.pooled_row,)

    def row(self, label):
        """Group row by label (the pooled row is ``pooled``)."""
        for row in self.group_rows:
            if row.label == label:
                return row
        raise KeyError(label)

    @property
    def pooled(self):
        return self.pooled_row


def _group_plan(group, plan):
    k = min(plan.k, len(group))
    if k < 2:
        return None
    return make_folds(group, k, plan.seed)


def _evaluate_row(dataset, plan):
    cells = {}
    for column, feature_set in COMPARISON_MODELS:
        if plan is None:
            cells[column] = None
            continue
        try:
            cells[column] = cross_validate(dataset, feature_set, plan)
        except (ModelingError, EmptyDatasetError) as e:
            logger.info(f"Model {column} unavailable for {len(dataset)} records: {e}")
            cells[column] = None
    return cells


def group_label(codec, decoder):
    return f"{codec} ({decoder})" if decoder else codec


def compare_models(dataset, plan):
    """
    Cross-validated errors of the 1-PE, 4-PE, 9-PE and decode time models,
    one row per (codec, decoder) group trained on that group only, plus a
    pooled "All" row trained without distinguishing codecs or decoders.

    Each group gets its own plan: make_folds over the group with the same
    seed and min(k, group size) folds.
    Cells a group is too small for are None.
    """
    dataset.require_non_empty("model comparison")

    rows = []
    for (codec, decoder), group in dataset.groups().items():
        rows.append(ComparisonRow(
            label=group_label(codec, decoder),
            codec=codec,
            decoder=decoder,
            n_records=len(group),
            cells=_evaluate_row(group, _group_plan(group, plan)),
        ))

    pooled = ComparisonRow(
        label=POOLED_LABEL,
        codec=None,
        decoder=None,
        n_records=len(dataset),
        cells=_evaluate_row(dataset, plan),
    )

    return ComparisonTable(
        columns=tuple(name for name, _ in COMPARISON_MODELS),
        group_rows=tuple(rows),
        pooled_row=pooled,
    )
