# decode_energy/commands/model.py
"""
Model commands: fit and save a model, predict with a saved model, and
the capacitance reading of the 1-PE model.
"""

import click

from decode_energy.errors import IncompleteInputError, ValidationError
from decode_energy.extensions import make_console
from decode_energy.models import FeatureSet, predictor_from_name
from decode_energy.services import reports
from decode_energy.services.cachegrind import load_profile, to_event_vector
from decode_energy.services.datasets import load_dataset, load_model, model_to_document, save_model
from decode_energy.services.energy_model import (
    capacitance_equivalence,
    fit_least_squares,
    implied_capacitance,
    predict,
)
from decode_energy.utils.decorators import handle_errors
from decode_energy.utils.formatting import format_energy, format_specific_energy

format_option = click.option(
    "--format", "output_format", type=click.Choice(["text", "json"]), default="text", show_default=True,
)


@click.command("fit")
@click.argument("dataset_path", type=click.Path(dir_okay=False))
@click.option("--features", default="4pe", show_default=True,
              help="Preset (1pe, 4pe, 9pe, time) or comma separated events")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Model file to write")
@click.option("--intercept", is_flag=True, help="Also fit a constant energy offset")
@format_option
@click.pass_obj
@handle_errors
def fit(config, dataset_path, features, out_path, intercept, output_format):
    """Least-squares fit of the specific energies, saved as a model file."""
    dataset = load_dataset(dataset_path)
    feature_set = FeatureSet.parse(features)
    model = fit_least_squares(dataset, feature_set, fit_intercept=intercept)
    save_model(model, out_path)

    if output_format == "json":
        click.echo(reports.to_json(model_to_document(model)))
        return
    console = make_console(config)
    console.print(reports.render_model(model))
    for warning in model.warnings:
        click.echo(f"Warning: {warning}", err=True)


def _parse_counts(text, feature_set):
    """Either LABEL=VALUE pairs or plain values in the model's feature order."""
    items = [item.strip() for item in text.split(",") if item.strip()]
    if items and all("=" in item for item in items):
        values = {}
        for item in items:
            label, _, value = item.partition("=")
            values[predictor_from_name(label)] = _number(value)
        return values

    if len(items) != len(feature_set):
        raise IncompleteInputError(
            f"model over {feature_set} needs {len(feature_set)} values, got {len(items)}"
        )
    return dict(zip(feature_set, (_number(item) for item in items)))


def _number(text):
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"not a number: {text!r}")
    if value < 0:
        raise ValidationError(f"inputs must be >= 0, got {value}")
    return value


@click.command("predict")
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option("--profile", "profile_path", type=click.Path(dir_okay=False), help="Cachegrind profile")
@click.option("--counts", help="Event counts in model order, or LABEL=VALUE pairs")
@click.option("--time", "decode_time", type=float, help="Decoding time in seconds (time model)")
@format_option
@click.pass_obj
@handle_errors
def predict_energy(config, model_path, profile_path, counts, decode_time, output_format):
    """Estimate the decoding energy of one run with a saved model."""
    given = [value for value in (profile_path, counts, decode_time) if value is not None]
    if len(given) != 1:
        raise ValidationError("give exactly one of --profile, --counts or --time")

    model = load_model(model_path)
    if profile_path is not None:
        inputs = to_event_vector(load_profile(profile_path))
    elif counts is not None:
        inputs = _parse_counts(counts, model.feature_set)
    else:
        if decode_time < 0:
            raise ValidationError(f"time must be >= 0, got {decode_time}")
        inputs = decode_time

    energy = predict(model, inputs)
    if output_format == "json":
        click.echo(reports.to_json({"features": list(model.feature_set.labels), "energy_J": energy}))
        return
    click.echo(format_energy(energy))


@click.command("capacitance")
@click.argument("dataset_path", type=click.Path(dir_okay=False))
@click.option("--voltage", type=float, default=None, help="Supply voltage in volts")
@format_option
@click.pass_obj
@handle_errors
def capacitance(config, dataset_path, voltage, output_format):
    """Implied C*V^2 per instruction from the 1-PE fit (and C at a given voltage)."""
    dataset = load_dataset(dataset_path)
    model, cv2 = capacitance_equivalence(dataset)
    switching = implied_capacitance(cv2, voltage) if voltage is not None else None

    if output_format == "json":
        document = {"cv2_J": cv2, "trained_on": model.trained_on}
        if switching is not None:
            document["voltage_V"] = switching.voltage
            document["capacitance_F"] = switching.capacitance
        click.echo(reports.to_json(document))
        return

    click.echo(f"C*V^2 = {cv2:.6g} J per instruction ({format_specific_energy(cv2)})")
    if switching is not None:
        click.echo(f"C = {switching.capacitance:.6g} F at {switching.voltage:.6g} V")
