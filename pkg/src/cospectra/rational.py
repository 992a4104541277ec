from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import InvalidParameter

_MAX_DENOMINATOR = 10**6


def as_fraction(x) -> Fraction:
    """Exact value of an int/Fraction, or the nearby simple rational of a float."""
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    f = Fraction(float(x)).limit_denominator(_MAX_DENOMINATOR)
    if abs(float(f) - float(x)) > 1e-12 * max(1.0, abs(float(x))):
        raise InvalidParameter(f"{x!r} is not close to a rational with small denominator")
    return f


def square_as_fraction(x) -> Fraction:
    """x**2 as a rational, for x such as sqrt(3/2) given as a float."""
    if isinstance(x, Rational):
        return Fraction(x) ** 2
    return as_fraction(float(x) * float(x))


def sqrt_float(q: Fraction) -> float:
    return math.sqrt(float(q))
