"""Arithmetic, geometric, and logarithmic means of positive reals.

The logarithmic mean follows the convention L(p, p) = p and switches to a
series around the midpoint once the arguments are relatively closer than
1e-8, where the textbook quotient has lost all precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["PositivePair", "arithmetic", "geometric", "logarithmic"]

_NEAR_EQUAL_REL = 1e-8


@dataclass(frozen=True)
class PositivePair:
    p: float
    q: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        for name, v in (("p", self.p), ("q", self.q)):
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a finite positive real, got {v!r}")


def arithmetic(pair: PositivePair) -> float:
    return 0.5 * (pair.p + pair.q)


def geometric(pair: PositivePair) -> float:
    # exp of the mean log avoids overflow of p*q for large arguments
    return math.exp(0.5 * (math.log(pair.p) + math.log(pair.q)))


def logarithmic(pair: PositivePair) -> float:
    # canonical argument order keeps the result bit-identical under swaps
    p, q = (pair.p, pair.q) if pair.p >= pair.q else (pair.q, pair.p)
    if p == q:
        return p
    if abs(p - q) / max(p, q) <= _NEAR_EQUAL_REL:
        # series about the midpoint; the quotient form cancels catastrophically
        m = 0.5 * (p + q)
        d = (p - q) / m
        return m * (1.0 - d * d / 12.0)
    ratio = p / q
    if 0.5 < ratio < 2.0:
        # log1p keeps the denominator accurate for moderately close arguments
        den = math.log1p((p - q) / q)
    else:
        den = math.log(p) - math.log(q)
    return (p - q) / den
