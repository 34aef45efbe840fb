# decode_energy/services/reports.py
"""
Report building and rendering

Every report has two forms: a plain dict (for ``--format json``) and a
rich Table (for text output). Numbers in dicts are raw floats; tables use
the canonical display formatting.
"""

import json

from rich import box
from rich.markup import escape
from rich.table import Table

from decode_energy.models import DECODE_TIME, AccessClass
from decode_energy.utils.formatting import (
    format_correlation,
    format_percent,
    format_specific_energy,
)


def to_json(document):
    return json.dumps(document, indent=2, sort_keys=False, ensure_ascii=False)


def _new_table(title, *columns):
    table = Table(title=title, box=box.SIMPLE_HEAD, title_justify="left")
    for index, column in enumerate(columns):
        table.add_column(column, justify="left" if index == 0 else "right")
    return table


# ============================================================================
# CORRELATION
# ============================================================================

def correlation_document(report):
    """Event labels and "time" mapped to their coefficient (None when undefined)."""
    return report.as_dict()


def correlation_groups_document(groups, pooled):
    return {
        "groups": [
            {"codec": codec, "decoder": decoder, "n_records": report.n_records,
             "correlations": correlation_document(report)}
            for (codec, decoder), report in groups.items()
        ],
        "pooled": {"n_records": pooled.n_records, "correlations": correlation_document(pooled)},
    }


def render_correlation(report, title="Pearson correlation with energy"):
    """3x3 grid (rows r / L1 / LL, columns I / R / W) plus the decode time."""
    table = _new_table(f"{escape(title)} ({report.n_records} records)", "", *(ac.value for ac in AccessClass))
    for level, values in report.grid():
        table.add_row(level.value, *(format_correlation(value) for value in values))
    table.add_section()
    table.add_row("DecodeTime", format_correlation(report[DECODE_TIME]), "", "")
    return table


# ============================================================================
# CROSS VALIDATION
# ============================================================================

def crossval_document(feature_set, plan, report, per_record=False):
    document = {
        "features": list(feature_set.labels),
        "k": plan.k,
        "seed": plan.seed,
        "n_records": report.n_records,
        "mean_relative_error": report.mean_relative_error,
    }
    if per_record:
        document["per_record"] = dict(report.per_record)
    return document


def render_crossval(feature_set, plan, report):
    table = _new_table(f"{plan.k}-fold cross validation", "Model", "Records", "Seed", "Mean rel. error")
    table.add_row(str(feature_set), str(report.n_records), str(plan.seed), format_percent(report.mean_relative_error))
    return table


def render_per_record(report):
    table = _new_table("Per-record relative error", "Record", "Rel. error")
    for record_id, error in report.per_record.items():
        table.add_row(escape(record_id), format_percent(error))
    return table


# ============================================================================
# SUBSET SELECTION
# ============================================================================

def selection_document(selection, plan, ranking=False):
    document = {
        "size": len(selection.feature_set),
        "k": plan.k,
        "seed": plan.seed,
        "best": list(selection.feature_set.labels),
        "mean_relative_error": selection.report.mean_relative_error,
    }
    if ranking:
        document["ranking"] = [
            {"features": list(feature_set.labels), "mean_relative_error": report.mean_relative_error}
            for feature_set, report in selection.ranking
        ]
    return document


def render_selection(selection, ranking=False):
    rows = selection.ranking if ranking else selection.ranking[:1]
    title = f"Best subset of {len(selection.feature_set)} events"
    if ranking:
        title += f" ({len(rows)} candidates)"
    table = _new_table(title, "Rank", "Events", "Mean rel. error")
    for rank, (feature_set, report) in enumerate(rows, start=1):
        table.add_row(str(rank), str(feature_set), format_percent(report.mean_relative_error))
    return table


# ============================================================================
# MODEL COMPARISON
# ============================================================================

def _error_or_none(report):
    return None if report is None else report.mean_relative_error


def comparison_document(table, plan):
    return {
        "k": plan.k,
        "seed": plan.seed,
        "columns": list(table.columns),
        "rows": [
            {
                "label": row.label,
                "codec": row.codec,
                "decoder": row.decoder,
                "n_records": row.n_records,
                "errors": {column: _error_or_none(row.cells[column]) for column in table.columns},
            }
            for row in table.rows
        ],
    }


def render_comparison(table, plan):
    rendered = _new_table(
        f"Cross-validated mean relative error ({plan.k} folds, seed {plan.seed})",
        "Codec (decoder)", "Records", *table.columns,
    )
    for row in table.rows:
        if row.codec is None:
            rendered.add_section()
        cells = [
            "n/a" if row.cells[column] is None else format_percent(row.cells[column].mean_relative_error)
            for column in table.columns
        ]
        rendered.add_row(escape(row.label), str(row.n_records), *cells)
    return rendered


# ============================================================================
# MODELS
# ============================================================================

def render_model(model):
    table = _new_table(f"Specific energies {model.feature_set}", "Event", "Joules", "Readable")
    for predictor, value in model.coefficients.items():
        table.add_row(
            predictor.label,
            f"{value:.6g}",
            format_specific_energy(value, per_second=predictor is DECODE_TIME),
        )
    if model.intercept:
        table.add_row("intercept", f"{model.intercept:.6g}", f"{model.intercept:.4g} J")
    return table
