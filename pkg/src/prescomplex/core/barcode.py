"""Intervals and barcodes."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import Final

INFINITY: Final[float] = math.inf

Degree = int | float


def format_index(value: Degree) -> str:
    """Render a birth or death index; infinity is written ``inf``."""
    return "inf" if value == INFINITY else str(int(value))


def parse_index(token: str) -> Degree:
    if token == "inf":
        return INFINITY
    value = int(token)
    if value < 0:
        raise ValueError(f"index must be non-negative, got {value}")
    return value


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open interval ``[birth, death)`` of integer indices.

    ``death`` may be :data:`INFINITY`. ``birth == death`` encodes a
    zero-length bar, which is representable but dropped from barcodes unless
    explicitly kept.
    """

    birth: int
    death: Degree = INFINITY

    def __post_init__(self) -> None:
        if self.birth < 0:
            raise ValueError(f"birth must be non-negative, got {self.birth}")
        if self.death < self.birth:
            raise ValueError(
                f"death {format_index(self.death)} precedes birth {self.birth}"
            )
        if self.death != INFINITY and self.death != int(self.death):
            raise ValueError(f"death must be an integer index, got {self.death}")

    @property
    def is_empty(self) -> bool:
        return self.birth == self.death

    @property
    def is_finite(self) -> bool:
        return self.death != INFINITY

    def contains(self, index: int) -> bool:
        return self.birth <= index < self.death

    def __str__(self) -> str:
        return f"[{self.birth},{format_index(self.death)})"


@dataclass(frozen=True, order=True)
class Bar:
    """An interval tagged with its homological degree."""

    degree: int
    interval: Interval

    def to_line(self) -> str:
        return (
            f"{self.degree} {self.interval.birth} "
            f"{format_index(self.interval.death)}"
        )


@dataclass(frozen=True)
class Barcode:
    """Multiset of bars.

    Bars are kept sorted by (degree, birth, death), so equality of two
    barcodes is multiset equality.
    """

    bars: tuple[Bar, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "bars", tuple(sorted(self.bars)))

    @classmethod
    def from_intervals(
        cls,
        intervals: Iterable[Interval],
        degree: int = 0,
        keep_empty: bool = False,
    ) -> Barcode:
        return cls(
            tuple(
                Bar(degree, interval)
                for interval in intervals
                if keep_empty or not interval.is_empty
            )
        )

    @classmethod
    def merge(cls, *barcodes: Barcode) -> Barcode:
        return cls(tuple(bar for barcode in barcodes for bar in barcode.bars))

    def without_empty(self) -> Barcode:
        return Barcode(tuple(bar for bar in self.bars if not bar.interval.is_empty))

    def intervals(self, degree: int | None = None) -> list[Interval]:
        return [
            bar.interval
            for bar in self.bars
            if degree is None or bar.degree == degree
        ]

    def multiplicities(self, degree: int | None = None) -> Counter[Interval]:
        return Counter(self.intervals(degree))

    def betti(self, index: int, degree: int | None = None) -> int:
        """Number of bars alive at ``index``."""
        return sum(1 for interval in self.intervals(degree) if interval.contains(index))

    def degrees(self) -> list[int]:
        return sorted({bar.degree for bar in self.bars})

    def to_lines(self) -> list[str]:
        return [bar.to_line() for bar in self.bars]

    def __iter__(self) -> Iterator[Bar]:
        return iter(self.bars)

    def __len__(self) -> int:
        return len(self.bars)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{bar.degree}:{bar.interval}" for bar in self.bars) + "}"
