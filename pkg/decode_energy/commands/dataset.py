# decode_energy/commands/dataset.py
"""
Dataset commands: ingest a measured run, generate a synthetic dataset.
"""

import logging
import os

import click

from decode_energy.errors import GeneratorSpecError, ValidationError
from decode_energy.models import DECODE_TIME, Dataset, MeasurementRecord, predictor_from_name
from decode_energy.services.cachegrind import load_profile, to_event_vector
from decode_energy.services.datasets import append_record, load_dataset, save_dataset
from decode_energy.services.synthetic import GENERATOR_PRESETS, GeneratorSpec, generate
from decode_energy.utils.decorators import handle_errors
from decode_energy.utils.sanitize import sanitize_field, sanitize_record_id

logger = logging.getLogger(__name__)


# ============================================================================
# INGEST
# ============================================================================

@click.command("ingest")
@click.argument("profile", type=click.Path(dir_okay=False))
@click.option("--dataset", "dataset_path", required=True, type=click.Path(dir_okay=False),
              help="Dataset CSV to append to (created if missing)")
@click.option("--energy", type=float, required=True, help="Net decoding energy in joules")
@click.option("--time", "decode_time", type=float, required=True, help="Decoding time in seconds")
@click.option("--id", "record_id", default=None, help="Record id (default: profile file name)")
@click.option("--codec", default="unknown", show_default=True)
@click.option("--decoder", default="", help="Decoder implementation")
@click.pass_obj
@handle_errors
def ingest(config, profile, dataset_path, energy, decode_time, record_id, codec, decoder):
    """Append one measured decoding run, with counts from a cachegrind PROFILE."""
    if not energy > 0:
        raise ValidationError(f"energy must be positive, got {energy}")
    if not decode_time >= 0:
        raise ValidationError(f"time must be >= 0, got {decode_time}")

    record_id = sanitize_record_id(record_id if record_id is not None else os.path.basename(profile))
    if record_id is None:
        raise ValidationError("record id must not be empty")

    events = to_event_vector(load_profile(profile))
    record = MeasurementRecord(
        id=record_id,
        codec=sanitize_field(codec),
        decoder=sanitize_field(decoder),
        energy=energy,
        decode_time=decode_time,
        events=events,
    )
    dataset = append_record(dataset_path, record)

    logger.info(f"Ingested {record_id} into {dataset_path}")
    click.echo(f"Appended {record_id} to {dataset_path} ({len(dataset)} records)")


# ============================================================================
# GENERATE
# ============================================================================

def _parse_coefficients(values):
    coefficients = {}
    for value in values:
        label, separator, number = value.partition("=")
        if not separator:
            raise GeneratorSpecError(f"coefficient must look like LABEL=JOULES, got {value!r}")
        kind = predictor_from_name(label)
        if kind is DECODE_TIME:
            raise GeneratorSpecError("the generator takes event coefficients only")
        try:
            coefficients[kind] = float(number)
        except ValueError:
            raise GeneratorSpecError(f"coefficient for {label} is not a number: {number!r}")
    return coefficients


@click.command("generate")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Dataset CSV to write")
@click.option("--preset", type=click.Choice(sorted(GENERATOR_PRESETS)), default="paper4", show_default=True)
@click.option("--coefficient", "coefficients", multiple=True, metavar="LABEL=JOULES",
              help="Ground-truth specific energy; replaces the preset's coefficients when given")
@click.option("-n", "--records", "n_records", type=int, default=500, show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Relative (log-normal) energy noise sigma")
@click.option("--seed", type=int, default=None, help="Generator seed [default: DEFAULT_SEED]")
@click.option("--codec", default="SYN", show_default=True)
@click.option("--decoder", default="synthetic", show_default=True)
@click.option("--time-resolution", type=float, default=None,
              help="Quantise decode times to this many seconds")
@click.option("--append", is_flag=True, help="Append to an existing dataset instead of replacing it")
@click.pass_obj
@handle_errors
def generate_dataset(config, out_path, preset, coefficients, n_records, noise, seed, codec, decoder,
                     time_resolution, append):
    """Write a seeded synthetic dataset with known specific energies."""
    seed = config.DEFAULT_SEED if seed is None else seed
    base = GENERATOR_PRESETS[preset](
        n_records=n_records,
        noise_sigma=noise,
        seed=seed,
        codec=sanitize_field(codec),
        decoder=sanitize_field(decoder),
    )
    spec = GeneratorSpec(
        n_records=base.n_records,
        true_coefficients=_parse_coefficients(coefficients) if coefficients else base.true_coefficients,
        count_ranges=base.count_ranges,
        noise_sigma=base.noise_sigma,
        seed=base.seed,
        codec=base.codec,
        decoder=base.decoder,
        l1_miss_fraction=base.l1_miss_fraction,
        ll_miss_fraction=base.ll_miss_fraction,
        time_resolution=time_resolution,
    )

    dataset = generate(spec, config)
    if append and os.path.exists(out_path):
        dataset = Dataset.concat(load_dataset(out_path, allow_empty=True), dataset)
    save_dataset(dataset, out_path)

    click.echo(f"Wrote {len(dataset)} records to {out_path}")
