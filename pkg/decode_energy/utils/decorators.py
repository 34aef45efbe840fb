# decode_energy/utils/decorators.py
import logging
import sys
from functools import wraps

import click

from decode_energy.errors import DecodeEnergyError

logger = logging.getLogger(__name__)


def handle_errors(f):
    """
    Report package errors on stderr and exit with their code
    (2 input, 3 validation, 4 modeling). Anything else propagates.
    """
    @wraps(f)
    def wrapped(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except DecodeEnergyError as e:
            logger.debug(f"{f.__name__} failed: {e}", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            sys.exit(e.exit_code)
    return wrapped
