"""Integer-tick simulation time.

The master clock counts ticks; one tick is an exact rational number of
seconds (default 1 microsecond).  All timeline arithmetic happens on
integers, so a 100 s run at 1 ms steps lands on 100.0 exactly instead of
accumulating float error step by step.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from fractions import Fraction

MICROSECOND = Fraction(1, 1_000_000)


def exact_fraction(value) -> Fraction:
    """Convert a number to the exact decimal it was written as.

    Floats go through their shortest repr, so a YAML ``0.001`` becomes
    Fraction(1, 1000) rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(Decimal(str(value)))
    except (InvalidOperation, ValueError) as exc:
        raise ValueError(f"not an exact decimal quantity: {value!r}") from exc


def ticks_for(seconds, resolution: Fraction) -> int:
    """Number of ticks in a duration; the duration must be tick-aligned."""
    ratio = exact_fraction(seconds) / resolution
    if ratio.denominator != 1:
        raise ValueError(
            f"{seconds} s is not an integer multiple of the tick resolution {resolution} s"
        )
    return int(ratio)


class SimTime:
    """A point on the shared timeline: tick count plus tick resolution."""

    __slots__ = ("ticks", "resolution", "seconds")

    def __init__(self, ticks: int, resolution: Fraction = MICROSECOND):
        if ticks < 0:
            raise ValueError("ticks must be non-negative")
        self.ticks = ticks
        self.resolution = resolution
        # Correctly rounded float of the exact rational ticks*resolution;
        # integer multiply/divide avoids Fraction overhead per step.
        self.seconds = ticks * resolution.numerator / resolution.denominator

    def exact_seconds(self) -> Fraction:
        return self.ticks * self.resolution

    def plus_ticks(self, n: int) -> "SimTime":
        return SimTime(self.ticks + n, self.resolution)

    def __eq__(self, other):
        return (
            isinstance(other, SimTime)
            and self.ticks == other.ticks
            and self.resolution == other.resolution
        )

    def __lt__(self, other: "SimTime"):
        return self.ticks < other.ticks

    def __le__(self, other: "SimTime"):
        return self.ticks <= other.ticks

    def __hash__(self):
        return hash((self.ticks, self.resolution))

    def __repr__(self):
        return f"SimTime({self.ticks} ticks = {self.seconds} s)"
