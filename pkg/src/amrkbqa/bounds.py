"""Truth intervals over [0, 1] with open-world semantics.

``[1,1]`` is classically true, ``[0,0]`` classically false, and ``[0,1]``
unknown: a fact absent from the knowledge base is unknown, not false.
An interval whose lower bound exceeds its upper bound is a contradiction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

_EPS = 1e-9


def _fmt(x: float) -> str:
    return f"{x:g}"


@dataclass(frozen=True)
class TruthBounds:
    lower: float
    upper: float

    def __post_init__(self):
        if not (-_EPS <= self.lower <= 1 + _EPS and -_EPS <= self.upper <= 1 + _EPS):
            raise ValueError(f"bounds outside [0,1]: [{self.lower}, {self.upper}]")

    @property
    def is_consistent(self) -> bool:
        return self.lower <= self.upper + _EPS

    @property
    def is_true(self) -> bool:
        return self.lower >= 1 - _EPS and self.upper >= 1 - _EPS

    @property
    def is_false(self) -> bool:
        return self.lower <= _EPS and self.upper <= _EPS

    @property
    def is_unknown(self) -> bool:
        return self.lower <= _EPS and self.upper >= 1 - _EPS

    @property
    def is_classical(self) -> bool:
        return self.is_true or self.is_false or self.is_unknown

    def negated(self) -> "TruthBounds":
        return TruthBounds(1 - self.upper, 1 - self.lower)

    def intersect(self, other: "TruthBounds") -> "TruthBounds":
        """Combine two sources of evidence; can only tighten."""
        return TruthBounds(max(self.lower, other.lower), min(self.upper, other.upper))

    def widens(self, other: "TruthBounds") -> bool:
        """True when this interval extends beyond ``other`` on either side."""
        return self.lower < other.lower - _EPS or self.upper > other.upper + _EPS

    def __str__(self) -> str:
        return f"[{_fmt(self.lower)},{_fmt(self.upper)}]"


TRUE = TruthBounds(1.0, 1.0)
FALSE = TruthBounds(0.0, 0.0)
UNKNOWN = TruthBounds(0.0, 1.0)


def conjunction(items: Iterable[TruthBounds]) -> TruthBounds:
    """Min/min combination (Goedel conjunction over intervals)."""
    items = list(items)
    if not items:
        return TRUE
    return TruthBounds(min(b.lower for b in items), min(b.upper for b in items))


def disjunction(items: Iterable[TruthBounds]) -> TruthBounds:
    """Max/max combination (Goedel disjunction over intervals)."""
    items = list(items)
    if not items:
        return UNKNOWN
    return TruthBounds(max(b.lower for b in items), max(b.upper for b in items))
