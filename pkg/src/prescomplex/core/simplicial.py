"""Finite simplicial complexes on integer vertices."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from prescomplex.core.validator import InvariantViolation

Simplex = tuple[int, ...]


def canonical(vertices: Iterable[int]) -> Simplex:
    """Sorted vertex tuple; raises on repeated vertices."""
    simplex = tuple(sorted(vertices))
    if len(set(simplex)) != len(simplex):
        raise InvariantViolation(f"simplex {simplex} repeats a vertex", entity=simplex)
    return simplex


def boundary_faces(simplex: Simplex) -> Iterator[tuple[int, Simplex]]:
    """Codimension-one faces with the sign ``(-1)^j`` of the removed position."""
    for j in range(len(simplex)):
        yield (-1) ** j, simplex[:j] + simplex[j + 1 :]


def incidence(face: Simplex, coface: Simplex) -> int:
    """Incidence number ``[face : coface]``; zero unless ``face`` is a facet."""
    if len(coface) != len(face) + 1:
        return 0
    for sign, candidate in boundary_faces(coface):
        if candidate == face:
            return sign
    return 0


def relabel_sign(simplex: Simplex, old: int, new: int) -> tuple[Simplex, int]:
    """Replace vertex ``old`` by ``new`` and sort.

    Returns:
        The sorted image and the sign of the sorting permutation
    """
    replaced = [new if v == old else v for v in simplex]
    # Moving ``new`` into place crosses every vertex strictly between them.
    position = replaced.index(new)
    crossings = sum(
        1 for i, v in enumerate(replaced) if i != position and min(old, new) < v < max(old, new)
    )
    return tuple(sorted(replaced)), (-1) ** crossings


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed set of simplices, stored sorted by (dimension, vertices)."""

    simplices: tuple[Simplex, ...]

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[int]]) -> SimplicialComplex:
        """Close a list of simplices under taking faces."""
        closure: set[Simplex] = set()
        for simplex in maximal:
            vertices = canonical(simplex)
            for size in range(1, len(vertices) + 1):
                closure.update(combinations(vertices, size))
        return cls(tuple(sorted(closure, key=lambda s: (len(s), s))))

    def __post_init__(self) -> None:
        present = set(self.simplices)
        for simplex in self.simplices:
            if len(simplex) > 1:
                for _, face in boundary_faces(simplex):
                    if face not in present:
                        raise InvariantViolation(
                            f"face {face} of {simplex} is missing", entity=simplex
                        )

    @cached_property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def skeleton(self, k: int) -> list[Simplex]:
        """The ``k``-simplices in canonical order."""
        return [s for s in self.simplices if len(s) == k + 1]

    @cached_property
    def _cofacets(self) -> dict[Simplex, list[Simplex]]:
        table: dict[Simplex, list[Simplex]] = {s: [] for s in self.simplices}
        for simplex in self.simplices:
            if len(simplex) > 1:
                for _, face in boundary_faces(simplex):
                    table[face].append(simplex)
        return table

    def cofacets(self, simplex: Simplex) -> list[Simplex]:
        return self._cofacets[simplex]

    def facet_pairs(self) -> Iterator[tuple[Simplex, Simplex]]:
        """All codimension-one pairs ``(face, coface)``."""
        for simplex in self.simplices:
            if len(simplex) > 1:
                for _, face in boundary_faces(simplex):
                    yield face, simplex

    def __contains__(self, simplex: object) -> bool:
        return simplex in self._cofacets

    def __len__(self) -> int:
        return len(self.simplices)
