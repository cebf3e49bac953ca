# Notes:
#   Duration helpers for the KEY VALUE configuration format. Values follow the
#   simulator convention of a number with an optional unit suffix:
#   "15M" (minutes), "30S" (seconds) or a bare number (seconds).
#
# Purpose:
#   To keep every simulated-time quantity in seconds internally while accepting the
#   human-friendly notation of the parameter tables.

from __future__ import annotations

import math
import re

_DURATION_RE = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([SsMm]?)\s*$")

_UNIT_SECONDS = {"": 1.0, "S": 1.0, "M": 60.0}


def parse_duration(text: str) -> float:
    """
    Parses a duration string into seconds.
    Args:
        text: Duration such as "15M", "30S", "0.1S" or "12".
    Returns:
        float: Duration in seconds.
    Raises:
        ValueError: If the text is not a non-negative duration.
    """
    m = _DURATION_RE.match(text)
    if m is None:
        raise ValueError(f"[ERROR] Not a duration: {text!r}")
    value = float(m.group(1)) * _UNIT_SECONDS[m.group(2).upper()]
    if not math.isfinite(value):
        raise ValueError(f"[ERROR] Not a finite duration: {text!r}")
    return value


def format_duration(seconds: float) -> str:
    """
    Renders seconds in the "<value>S" notation accepted by parse_duration.
    The float repr is kept so that parse_duration(format_duration(x)) == x.
    """
    return f"{float(seconds)!r}S"
