"""Utility functions for freudsobolev."""

from __future__ import annotations

import re
from typing import Any

import numpy as np

from .exceptions import ConfigurationError


def parse_grid(text: str) -> list[float]:
    """
    Parse a comma separated list of numbers like '0,0.2,2'.

    Args:
        text: Grid string

    Returns:
        List of floats in the given order
    """
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Invalid grid '{text}': {e}", {"grid": text})
    if not values:
        raise ConfigurationError(f"Empty grid '{text}'", {"grid": text})
    return values


def parse_int_range(text: str) -> list[int]:
    """
    Parse '1..19' (odd or even stepping follows the start) or '1,3,5'.

    A range 'a..b' keeps the parity of a, matching the odd degree rows of the
    biquartic table.
    """
    match = re.match(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$", text)
    if match:
        start, stop = int(match.group(1)), int(match.group(2))
        if stop < start:
            raise ConfigurationError(f"Empty range '{text}'", {"range": text})
        return list(range(start, stop + 1, 2))
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Invalid integer list '{text}': {e}", {"range": text})


def parse_key_value(text: str) -> tuple[str, float]:
    """Parse a tolerance override 'KEY=VAL'."""
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigurationError(f"Expected KEY=VAL, got '{text}'", {"override": text})
    try:
        return key.strip(), float(value)
    except ValueError:
        raise ConfigurationError(f"Tolerance value must be numeric in '{text}'", {"override": text})


def loglog_slope(x: Any, y: Any) -> float:
    """Least squares slope of log|y| against log x; nan when fewer than two usable points."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    usable = (x > 0) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(usable) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(x[usable]), np.log(y[usable]), 1)
    return float(slope)


def semilog_slope(x: Any, y: Any) -> float:
    """Least squares slope of log10|y| against x; 10**slope is the growth per unit step."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    usable = np.isfinite(x) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(usable) < 2:
        return float("nan")
    slope, _ = np.polyfit(x[usable], np.log10(y[usable]), 1)
    return float(slope)


def format_number(value: Any, full_precision: bool = False) -> str:
    """Fixed 6-decimal formatting, or repr-exact with full_precision."""
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(value)
    if full_precision:
        return repr(float(value))
    return f"{float(value):.6f}"


def round_half(value: float, digits: int = 6) -> float:
    """Round to the printed precision; -0.0 becomes 0.0."""
    rounded = round(float(value), digits)
    return rounded + 0.0
