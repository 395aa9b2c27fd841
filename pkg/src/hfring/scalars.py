"""Engine configuration and scalar arithmetic.

Two scalar modes are supported, selected process-wide: exact rationals
(``fractions.Fraction``) for piecewise-linear and polynomial work, where
identities are checked with literal equality, and binary floats with a
comparison tolerance for transcendental pieces.  Modes are never mixed
inside one computation; callers switch with `set_mode` or the
`engine_mode` context manager.

Float mode performs no directed rounding: endpoints are computed with
ordinary nearest rounding, so results are set-theoretic values up to the
comparison tolerance, not rigorous enclosures.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Optional, Union

from .errors import EngineError, NumericRangeError

RATIONAL = "rational"
FLOAT = "float"

Scalar = Union[Fraction, float]

DEFAULT_TOLERANCE = 1e-9
DEFAULT_SEED = 8201
DEFAULT_SAMPLE_COUNT = 128

_mode = RATIONAL
_tolerance = DEFAULT_TOLERANCE
_seed = DEFAULT_SEED
_sample_count = DEFAULT_SAMPLE_COUNT


def set_mode(mode: str, tolerance: Optional[float] = None) -> None:
    """Select the scalar mode ("rational" or "float") for the process."""
    global _mode, _tolerance
    if mode not in (RATIONAL, FLOAT):
        raise EngineError(f"unknown mode {mode!r}")
    _mode = mode
    if tolerance is not None:
        if tolerance <= 0:
            raise EngineError("tolerance must be positive")
        _tolerance = tolerance


def get_mode() -> str:
    return _mode


def get_tolerance() -> float:
    return _tolerance


def set_seed(seed: int) -> None:
    """Seed for every deterministic pseudo-random sampling in the engine."""
    global _seed
    _seed = int(seed)


def get_seed() -> int:
    return _seed


def set_sample_count(count: int) -> None:
    global _sample_count
    if count < 1:
        raise EngineError("sample count must be at least 1")
    _sample_count = int(count)


def get_sample_count() -> int:
    return _sample_count


@contextmanager
def engine_mode(mode: str, tolerance: Optional[float] = None) -> Iterator[None]:
    """Temporarily switch scalar mode (used heavily by tests)."""
    global _mode, _tolerance
    saved = (_mode, _tolerance)
    try:
        set_mode(mode, tolerance)
        yield
    finally:
        _mode, _tolerance = saved


def to_scalar(value) -> Scalar:
    """Coerce a number (or numeric string) to the current mode's scalar.

    In rational mode float and decimal-string inputs are read with decimal
    semantics, so ``0.1`` becomes exactly 1/10.  Strings may also carry a
    fraction ``"p/q"``.  Non-finite values are rejected.
    """
    if _mode == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise EngineError("non-finite value has no rational scalar")
            return Fraction(str(value))
        if isinstance(value, str):
            return Fraction(value.strip())
        raise EngineError(f"cannot coerce {value!r} to a rational scalar")
    if isinstance(value, str):
        value = Fraction(value.strip())
    result = float(value)
    if not math.isfinite(result):
        raise NumericRangeError(f"non-finite scalar {value!r}")
    return result


def is_finite(value: Scalar) -> bool:
    if isinstance(value, Fraction):
        return True
    return math.isfinite(value)


def check_finite(value: Scalar) -> Scalar:
    if not is_finite(value):
        raise NumericRangeError(f"numeric range exceeded: {value!r}")
    return value


def scalar_eq(a: Scalar, b: Scalar) -> bool:
    """Equality test: exact for rationals, within tolerance for floats."""
    if _mode == RATIONAL:
        return a == b
    return abs(a - b) <= _tolerance


def scalar_abs(a: Scalar) -> Scalar:
    return -a if a < 0 else a


def format_scalar(a: Scalar) -> str:
    """Print a scalar for CLI/JSON output.

    Rational mode prints an exact decimal when the denominator allows it and
    ``p/q`` otherwise; float mode prints 17 significant digits so values
    round-trip.
    """
    if isinstance(a, Fraction):
        if a.denominator == 1:
            return str(a.numerator)
        decimal = _terminating_decimal(a)
        return decimal if decimal is not None else f"{a.numerator}/{a.denominator}"
    return "%.17g" % a


def _terminating_decimal(a: Fraction) -> Optional[str]:
    den = a.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    scaled = abs(a.numerator) * 10**digits // a.denominator
    text = str(scaled).rjust(digits + 1, "0")
    whole, frac = text[:-digits], text[-digits:]
    sign = "-" if a.numerator < 0 else ""
    return f"{sign}{whole}.{frac}"


def parse_scalar(text: str) -> Scalar:
    """Read a CLI-supplied number (integer, decimal, or ``p/q``)."""
    return to_scalar(text)
