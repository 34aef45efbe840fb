# decode_energy/commands/analysis.py
"""
Analysis commands: correlation table, cross validation, subset
selection and the per-decoder model comparison.
"""

import click

from decode_energy.extensions import make_console
from decode_energy.models import FeatureSet
from decode_energy.services import reports
from decode_energy.services.datasets import load_dataset
from decode_energy.services.stats import correlation_by_group, correlation_report
from decode_energy.services.validation import (
    POOLED_LABEL,
    compare_models,
    cross_validate,
    group_label,
    make_folds,
    select_subset,
)
from decode_energy.utils.decorators import handle_errors

format_option = click.option(
    "--format", "output_format", type=click.Choice(["text", "json"]), default="text", show_default=True,
)
k_option = click.option("--k", type=int, default=None, help="Number of folds [default: DEFAULT_K]")
seed_option = click.option("--seed", type=int, default=None, help="Fold seed [default: DEFAULT_SEED]")


def _plan(config, dataset, k, seed):
    k = config.DEFAULT_K if k is None else k
    seed = config.DEFAULT_SEED if seed is None else seed
    return make_folds(dataset, k, seed)


@click.command("correlate")
@click.argument("dataset_path", type=click.Path(dir_okay=False))
@click.option("--by-group", is_flag=True, help="One table per (codec, decoder) plus the pooled set")
@format_option
@click.pass_obj
@handle_errors
def correlate(config, dataset_path, by_group, output_format):
    """Pearson correlation of every event count with the measured energy."""
    dataset = load_dataset(dataset_path)

    if by_group:
        groups, pooled = correlation_by_group(dataset)
        if output_format == "json":
            click.echo(reports.to_json(reports.correlation_groups_document(groups, pooled)))
            return
        console = make_console(config)
        for (codec, decoder), report in groups.items():
            console.print(reports.render_correlation(report, title=group_label(codec, decoder)))
        console.print(reports.render_correlation(pooled, title=POOLED_LABEL))
        return

    report = correlation_report(dataset)
    if output_format == "json":
        click.echo(reports.to_json(reports.correlation_document(report)))
        return
    make_console(config).print(reports.render_correlation(report))


@click.command("crossval")
@click.argument("dataset_path", type=click.Path(dir_okay=False))
@click.option("--features", default="4pe", show_default=True,
              help="Preset (1pe, 4pe, 9pe, time) or comma separated events")
@k_option
@seed_option
@click.option("--per-record", is_flag=True, help="Also list every record's relative error")
@format_option
@click.pass_obj
@handle_errors
def crossval(config, dataset_path, features, k, seed, per_record, output_format):
    """K-fold cross-validated mean relative error of one model."""
    dataset = load_dataset(dataset_path)
    feature_set = FeatureSet.parse(features)
    plan = _plan(config, dataset, k, seed)
    report = cross_validate(dataset, feature_set, plan)

    if output_format == "json":
        click.echo(reports.to_json(reports.crossval_document(feature_set, plan, report, per_record)))
        return
    console = make_console(config)
    console.print(reports.render_crossval(feature_set, plan, report))
    if per_record:
        console.print(reports.render_per_record(report))


@click.command("select")
@click.argument("dataset_path", type=click.Path(dir_okay=False))
@click.option("--size", type=int, default=4, show_default=True, help="Number of events in the subset")
@k_option
@seed_option
@click.option("--ranking", is_flag=True, help="List every candidate subset, best first")
@format_option
@click.pass_obj
@handle_errors
def select(config, dataset_path, size, k, seed, ranking, output_format):
    """Exhaustive search for the event subset with the lowest cross-validated error."""
    dataset = load_dataset(dataset_path)
    plan = _plan(config, dataset, k, seed)
    selection = select_subset(dataset, size, plan)

    if output_format == "json":
        click.echo(reports.to_json(reports.selection_document(selection, plan, ranking)))
        return
    make_console(config).print(reports.render_selection(selection, ranking))


@click.command("compare")
@click.argument("dataset_path", type=click.Path(dir_okay=False))
@k_option
@seed_option
@format_option
@click.pass_obj
@handle_errors
def compare(config, dataset_path, k, seed, output_format):
    """Cross-validated errors of the 1-PE, 4-PE, 9-PE and time models per decoder."""
    dataset = load_dataset(dataset_path)
    plan = _plan(config, dataset, k, seed)
    table = compare_models(dataset, plan)

    if output_format == "json":
        click.echo(reports.to_json(reports.comparison_document(table, plan)))
        return
    make_console(config).print(reports.render_comparison(table, plan))
