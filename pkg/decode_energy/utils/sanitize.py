# decode_energy/utils/sanitize.py
"""
Sanitization of free-text metadata before it lands in a dataset row.
"""
import re


def sanitize_field(text):
    """
    Clean a metadata value (record id, codec, decoder) for a CSV cell.

    Line breaks would split the row, so they are collapsed to a single
    space; surrounding whitespace is stripped.

    Args:
        text: user-provided value

    Returns:
        Sanitized string ("" for empty input)
    """
    if text is None:
        return ""

    text = re.sub(r'[\r\n]+', ' ', str(text))
    return text.strip()


def sanitize_record_id(text):
    """
    Record ids additionally may not contain whitespace or commas.

    Returns:
        Sanitized id, or None if nothing usable is left
    """
    text = sanitize_field(text)
    text = re.sub(r'[\s,]+', '_', text)
    return text or None
