"""Input validation helpers shared by the estimators, pipeline and CLI."""

import math
import os
from fractions import Fraction

import mpmath
import numpy as np

from ._errors import ValidationError

DEFAULT_PRECISION_BITS = 256
MAX_PRECISION_BITS = 4096


def default_precision():
    """Working precision in bits, honouring ``VSL_PRECISION_BITS``."""
    raw = os.environ.get("VSL_PRECISION_BITS")
    if raw is None:
        return DEFAULT_PRECISION_BITS
    return check_precision_bits(raw)


def check_precision_bits(bits):
    try:
        bits = int(bits)
    except (TypeError, ValueError):
        raise ValidationError(f"precision must be an integer number of bits, got {bits!r}")
    if bits < 53 or bits > MAX_PRECISION_BITS:
        raise ValidationError(f"precision must lie in [53, {MAX_PRECISION_BITS}] bits, got {bits}")
    return bits


def _is_real_scalar(x):
    return isinstance(x, (int, float, Fraction, mpmath.mpf, np.floating, np.integer))


def check_positive_sequence(values, name="a", min_length=1):
    """Return ``values`` as a tuple after checking every entry is a finite positive real.

    Entries keep their numeric type (float, Fraction or mpf) so that exact and
    high-precision inputs are not silently rounded.
    """
    if isinstance(values, np.ndarray):
        values = values.tolist()
    try:
        values = tuple(values)
    except TypeError:
        raise ValidationError(f"{name} must be a sequence of positive reals")
    if len(values) < min_length:
        raise ValidationError(f"{name} needs at least {min_length} entries, got {len(values)}")
    for i, v in enumerate(values):
        if not _is_real_scalar(v):
            raise ValidationError(f"{name}[{i}] is not a real number: {v!r}")
        if isinstance(v, (float, np.floating)) and not math.isfinite(v):
            raise ValidationError(f"{name}[{i}] is not finite")
        if not v > 0:
            raise ValidationError(f"{name}[{i}] must be positive, got {v}")
    return values


def check_time_grid(times):
    """Parse a time grid into an ascending tuple of nonnegative floats."""
    if isinstance(times, str):
        try:
            times = [float(x) for x in times.split(",") if x.strip()]
        except ValueError:
            raise ValidationError(f"cannot parse time grid {times!r}")
    elif np.isscalar(times):
        times = [times]
    times = tuple(float(t) for t in times)
    if not times:
        raise ValidationError("time grid is empty")
    if any(not math.isfinite(t) or t < 0 for t in times):
        raise ValidationError("time grid entries must be finite and nonnegative")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValidationError("time grid must be strictly ascending")
    return times


def check_count(n, name="n", minimum=1):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValidationError(f"{name} must be an integer, got {n!r}")
    if n < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {n}")
    return int(n)
