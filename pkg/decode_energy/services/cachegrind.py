# decode_energy/services/cachegrind.py
"""
Cachegrind output parsing

Reads ``cachegrind.out.<pid>`` files and turns the program totals on the
``summary:`` line into an EventVector. Per-file / per-function body lines
are tolerated but not interpreted.
"""

import logging
import re
from dataclasses import dataclass

from decode_energy.errors import (
    InputError,
    MalformedProfileError,
    ProfileArityError,
    ProfileParseError,
    UnmappedEventError,
)
from decode_energy.models import EVENT_KINDS, EventVector

logger = logging.getLogger(__name__)

# Header keys handled explicitly; any other "key:" header is kept verbatim
DESC_PREFIX = "desc:"
CMD_PREFIX = "cmd:"
EVENTS_PREFIX = "events:"
SUMMARY_PREFIX = "summary:"

HEADER_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*:")
# fl=, fn=, fi=, fe=, ob=, calls=, cfn= ... (callgrind extensions skipped too)
SPEC_LINE_RE = re.compile(r"^[a-z]+=")
COUNT_TOKEN_RE = re.compile(r"^[0-9]+$")


@dataclass(frozen=True)
class CachegrindProfile:
    command: str
    event_names: tuple
    totals: tuple
    description_lines: tuple = ()

    def total(self, name):
        try:
            return self.totals[self.event_names.index(name)]
        except ValueError:
            raise UnmappedEventError(f"event '{name}' is not in the profile")

    def as_dict(self):
        return dict(zip(self.event_names, self.totals))

    def to_text(self):
        """Minimal profile text holding the headers and the summary line."""
        lines = [f"{DESC_PREFIX} {line}" for line in self.description_lines]
        lines.append(f"{CMD_PREFIX} {self.command}")
        lines.append(f"{EVENTS_PREFIX} {' '.join(self.event_names)}")
        lines.append(f"{SUMMARY_PREFIX} {' '.join(str(total) for total in self.totals)}")
        return "\n".join(lines) + "\n"


def _header_value(line, prefix):
    value = line[len(prefix):]
    return value[1:] if value.startswith(" ") else value


def _split_lines(data):
    if isinstance(data, (bytes, bytearray)):
        # ASCII compatible; anything else in cmd: survives the round trip
        data = bytes(data).decode("utf-8", errors="surrogateescape")
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def parse_profile(data):
    """
    Parse cachegrind output.

    Args:
        data: file contents as bytes or str (LF or CRLF line endings)

    Returns:
        CachegrindProfile with the header fields and the summary totals

    Raises:
        MalformedProfileError: missing/duplicate events: or summary: line,
            or an unrecognised line
        ProfileArityError: summary length differs from the events list
        ProfileParseError: summary token is not a base-10 integer
    """
    lines = _split_lines(data)

    command = ""
    event_names = None
    totals = None
    description_lines = []

    for line_number, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue

        if line.startswith(DESC_PREFIX):
            description_lines.append(_header_value(line, DESC_PREFIX))
        elif line.startswith(CMD_PREFIX):
            command = _header_value(line, CMD_PREFIX)
        elif line.startswith(EVENTS_PREFIX):
            if event_names is not None:
                raise MalformedProfileError("duplicate 'events:' line", line_number)
            event_names = tuple(_header_value(line, EVENTS_PREFIX).split())
            if not event_names:
                raise MalformedProfileError("'events:' line lists no events", line_number)
        elif line.startswith(SUMMARY_PREFIX):
            if event_names is None:
                raise MalformedProfileError("'summary:' line before 'events:' line", line_number)
            if totals is not None:
                raise MalformedProfileError("duplicate 'summary:' line", line_number)
            totals = _parse_totals(_header_value(line, SUMMARY_PREFIX), event_names, line_number)
        elif HEADER_RE.match(line):
            # Profiler versions add header keys; keep them rather than reject
            description_lines.append(line)
        elif SPEC_LINE_RE.match(line) or line[0].isdigit() or line[0] in "+-":
            continue
        else:
            raise MalformedProfileError(f"unrecognised line {line[:40]!r}", line_number)

    if event_names is None:
        raise MalformedProfileError("missing 'events:' line", len(lines))
    if totals is None:
        raise MalformedProfileError("missing 'summary:' line", len(lines))

    logger.debug(f"Parsed cachegrind profile for '{command}' with {len(event_names)} events")
    return CachegrindProfile(
        command=command,
        event_names=event_names,
        totals=totals,
        description_lines=tuple(description_lines),
    )


def _parse_totals(text, event_names, line_number):
    tokens = text.split()
    for token in tokens:
        if not COUNT_TOKEN_RE.match(token):
            raise ProfileParseError(f"summary token {token!r} is not an integer", line_number)
    if len(tokens) != len(event_names):
        raise ProfileArityError(
            f"summary lists {len(tokens)} counts for {len(event_names)} events",
            line_number,
        )
    return tuple(int(token, 10) for token in tokens)


def load_profile(path):
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise InputError(f"cannot read profile {path}: {e}")
    return parse_profile(data)


def to_event_vector(profile):
    """
    Map the canonical cachegrind totals onto an EventVector.

    Ir/I1mr/ILmr -> I_r/I_L1/I_LL, Dr/D1mr/DLmr -> R_r/R_L1/R_LL,
    Dw/D1mw/DLmw -> W_r/W_L1/W_LL. Extra columns (e.g. Bc, Bcm) are ignored.

    Raises:
        UnmappedEventError: a canonical name is missing
        InvalidEventVectorError: the totals violate the cache hierarchy
    """
    available = profile.as_dict()
    missing = [kind.cachegrind_name for kind in EVENT_KINDS if kind.cachegrind_name not in available]
    if missing:
        raise UnmappedEventError(f"profile lacks event columns: {', '.join(missing)}")

    extra = [name for name in profile.event_names if name not in {k.cachegrind_name for k in EVENT_KINDS}]
    if extra:
        logger.debug(f"Ignoring extra event columns: {', '.join(extra)}")

    return EventVector(tuple(available[kind.cachegrind_name] for kind in EVENT_KINDS))
