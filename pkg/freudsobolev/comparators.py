"""Comparison functions for computed values against references and bounds."""

from __future__ import annotations

import math
from typing import Any, Optional


def compare_numbers(
    expected: Any,
    computed: Any,
    tolerance: Optional[float] = None
) -> tuple[bool, str]:
    """
    Compare two numeric values with optional absolute tolerance.

    Args:
        expected: The reference value
        computed: The computed value
        tolerance: Maximum allowed absolute difference

    Returns:
        Tuple of (is_match, message)
    """
    try:
        expected_float = float(expected)
        computed_float = float(computed)
    except (ValueError, TypeError) as e:
        return False, f"Cannot convert to number: {e}"

    if math.isnan(computed_float):
        return False, "Computed value is NaN"

    if tolerance is not None:
        diff = abs(expected_float - computed_float)
        if diff <= tolerance:
            return True, ""
        return False, f"Value difference ({diff:.3e}) exceeds tolerance ({tolerance:.1e})"

    if expected_float == computed_float:
        return True, ""

    return False, f"Values differ: {expected} != {computed}"


def compare_flags(expected: Any, computed: Any) -> tuple[bool, str]:
    """Exact comparison of boolean markers such as interlacing ruptures."""
    if bool(expected) == bool(computed):
        return True, ""
    return False, f"Flags differ: {expected} != {computed}"


def compare_cell(expected: Any, computed: Any, tolerance: Optional[float]) -> tuple[bool, str]:
    """Dispatch on the reference value's type."""
    if expected is None:
        return False, "Reference value is null"
    if computed is None:
        return False, "No computed value"
    if isinstance(expected, bool):
        return compare_flags(expected, computed)
    if isinstance(expected, (int, float)):
        return compare_numbers(expected, computed, tolerance)
    if expected == computed:
        return True, ""
    return False, f"Values differ: {expected} != {computed}"


def check_bound(measured: float, tolerance: float) -> tuple[bool, str]:
    """Pass when a residual-like measurement lies within its tolerance."""
    if math.isnan(measured):
        return False, "Measurement is NaN"
    if measured <= tolerance:
        return True, ""
    return False, f"Measured {measured:.3e} exceeds tolerance {tolerance:.1e}"


def check_decay_exponent(fitted: float, stated: float, slack: float) -> tuple[bool, str]:
    """
    One-sided decay check: the fitted exponent of a quantity decaying like
    n^{stated} may not exceed stated + slack. Faster decay passes.
    """
    if math.isnan(fitted):
        return False, "Exponent could not be fitted"
    if fitted <= stated + slack:
        return True, ""
    return False, f"Fitted exponent {fitted:.3f} is slower than {stated:.3f} + {slack}"

