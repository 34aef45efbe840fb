# decode_energy/utils/formatting.py
"""
Canonical number formatting for files and reports.

Reals use up to 12 significant digits (``%.12g``), so a value written,
read back and written again produces the same text.
"""

import math

# (threshold, divisor, unit) from largest to smallest
_ENERGY_UNITS = (
    (1e-1, 1.0, "J"),
    (1e-4, 1e-3, "mJ"),
    (1e-7, 1e-6, "µJ"),
    (0.0, 1e-9, "nJ"),
)


def format_real(value):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot format non-finite value {value}")
    text = f"{value:.12g}"
    return "0" if text == "-0" else text


def format_percent(fraction):
    """Relative error as a percentage with two decimals, e.g. ``11.78 %``."""
    return f"{100.0 * fraction:.2f} %"


def format_correlation(value):
    if value is None:
        return "n/a"
    return f"{value:.4f}"


def format_energy(joules):
    """Energy estimate in joules, e.g. ``6.79 J``."""
    return f"{joules:.6g} J"


def format_specific_energy(joules, per_second=False):
    """
    Specific energy in a readable unit, e.g. ``0.47 nJ`` or ``0.43 µJ``.

    Decode time coefficients are joules per second and shown in watts.
    """
    if per_second:
        return f"{joules:.4g} W"
    magnitude = abs(joules)
    for threshold, divisor, unit in _ENERGY_UNITS:
        if magnitude >= threshold:
            return f"{joules / divisor:.4g} {unit}"
    return f"{joules:.4g} J"
