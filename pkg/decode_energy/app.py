# decode_energy/app.py
import importlib
import logging
import os
import sys

import click

from decode_energy.commands.analysis import compare, correlate, crossval, select
from decode_energy.commands.dataset import generate_dataset, ingest
from decode_energy.commands.model import capacitance, fit, predict_energy
from decode_energy.extensions import init_cache

DEFAULT_CONFIG_CLASS = "decode_energy.config.BaseConfig"


def load_config(config_class=None):
    """Resolve a config class object or a dotted path (DECODE_ENERGY_CONFIG)."""
    if config_class is None:
        config_class = os.getenv("DECODE_ENERGY_CONFIG", DEFAULT_CONFIG_CLASS)
    if not isinstance(config_class, str):
        return config_class

    module_name, _, class_name = config_class.rpartition(".")
    try:
        return getattr(importlib.import_module(module_name), class_name)
    except (ImportError, AttributeError, ValueError) as e:
        raise ValueError(f"Cannot load configuration {config_class!r}: {e}")


def create_app(config_class=None):
    """
    Build the command line application.

    Resolves and validates the configuration, sets up logging on stderr
    (stdout carries command output only) and the result cache, then
    registers every command on the ``decode-energy`` group.
    """
    config = load_config(config_class)
    config.validate()

    level = logging.DEBUG if config.DEBUG else getattr(logging, config.LOG_LEVEL)
    logging.basicConfig(
        level=level,
        format=config.LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
    init_cache(config)
    logging.getLogger(__name__).debug(f"Using configuration: {config.__module__}.{config.__name__}")

    @click.group(name="decode-energy")
    @click.pass_context
    def cli(ctx):
        """Estimate video decoding energy from processor event counts."""
        ctx.obj = config

    # Dataset
    cli.add_command(ingest)
    cli.add_command(generate_dataset)

    # Analysis
    cli.add_command(correlate)
    cli.add_command(crossval)
    cli.add_command(select)
    cli.add_command(compare)

    # Models
    cli.add_command(fit)
    cli.add_command(predict_energy)
    cli.add_command(capacitance)

    return cli
