"""Exact arithmetic on dyadic subintervals of [0, 1).

Intervals are identified by an integer pair (level, index); endpoints are only
materialized as binary rationals, so all tree logic is exact integer work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

#: Deepest level at which the tree may be subdivided.  Spine intervals
#: I_k = [0, 2^-k) never enumerate leaves and may go deeper.
DEFAULT_MAX_DEPTH = 60


class DepthOverflowError(ValueError):
    """Requested a subdivision below the configured maximum depth."""


@dataclass(frozen=True)
class DyadicInterval:
    """The interval [index * 2^-level, (index + 1) * 2^-level)."""

    level: int
    index: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError(f"negative level {self.level}")
        if not 0 <= self.index < 2 ** self.level:
            raise ValueError(f"index {self.index} out of range at level {self.level}")

    @property
    def measure(self) -> Fraction:
        return Fraction(1, 2 ** self.level)

    @property
    def left(self) -> Fraction:
        return Fraction(self.index, 2 ** self.level)

    @property
    def right(self) -> Fraction:
        return Fraction(self.index + 1, 2 ** self.level)

    def contains(self, other: "DyadicInterval") -> bool:
        if other.level < self.level:
            return False
        return other.index >> (other.level - self.level) == self.index


def children(q: DyadicInterval, max_depth: int = DEFAULT_MAX_DEPTH) -> tuple[DyadicInterval, DyadicInterval]:
    """Left and right halves of ``q``; they partition ``q`` exactly."""
    if q.level >= max_depth:
        raise DepthOverflowError(f"cannot subdivide below level {max_depth}")
    return (
        DyadicInterval(q.level + 1, 2 * q.index),
        DyadicInterval(q.level + 1, 2 * q.index + 1),
    )


def spine(k: int) -> DyadicInterval:
    """I_k = [0, 2^-k), the left-anchored chain toward the singular point 0."""
    if k < 0:
        raise ValueError("spine index must be nonnegative")
    return DyadicInterval(k, 0)


def shell(n: int) -> DyadicInterval:
    """J_n = [2^-n, 2^-(n-1)), the right child of I_{n-1}.  Requires n >= 1."""
    if n < 1:
        raise ValueError("shell index must be >= 1")
    return DyadicInterval(n, 1)


def endpoints(q: DyadicInterval) -> tuple[Fraction, Fraction]:
    """Exact (left, right) endpoints as binary rationals."""
    return q.left, q.right


def level_intervals(n: int) -> list[DyadicInterval]:
    """All dyadic intervals at level n; they partition [0, 1)."""
    return [DyadicInterval(n, k) for k in range(2 ** n)]
