"""Tests for simplicial complexes and boundary signs."""

import pytest

from prescomplex.core.simplicial import (
    SimplicialComplex,
    boundary_faces,
    canonical,
    incidence,
    relabel_sign,
)
from prescomplex.core.validator import InvariantViolation


def _euler_characteristic(complex: SimplicialComplex) -> int:
    return sum((-1) ** (len(simplex) - 1) for simplex in complex.simplices)


class TestSimplexHelpers:
    """Test suite for the simplex-level helpers."""

    def test_canonical_sorts_vertices(self) -> None:
        """Test that simplices are stored with sorted vertices."""
        assert canonical([2, 0, 1]) == (0, 1, 2)

    def test_canonical_rejects_repeats(self) -> None:
        """Test that a repeated vertex is refused."""
        with pytest.raises(InvariantViolation) as exc_info:
            canonical([1, 1])

        assert exc_info.value.entity == (1, 1)

    def test_boundary_faces_alternate_signs(self) -> None:
        """Test the signed faces of a triangle."""
        assert list(boundary_faces((0, 1, 2))) == [(1, (1, 2)), (-1, (0, 2)), (1, (0, 1))]

    @pytest.mark.parametrize(
        ("face", "coface", "expected"),
        [
            ((1, 2), (0, 1, 2), 1),
            ((0, 2), (0, 1, 2), -1),
            ((0,), (0, 1), -1),
            ((0, 1), (0, 1, 2, 3), 0),
            ((3,), (0, 1), 0),
        ],
    )
    def test_incidence(self, face: tuple[int, ...], coface: tuple[int, ...], expected: int) -> None:
        """Test incidence numbers of face pairs."""
        assert incidence(face, coface) == expected

    @pytest.mark.parametrize(
        ("simplex", "old", "new", "expected"),
        [
            ((0, 2, 3), 3, 1, ((0, 1, 2), -1)),
            ((0, 1), 0, 5, ((1, 5), -1)),
            ((1, 4), 4, 2, ((1, 2), 1)),
        ],
    )
    def test_relabel_sign(
        self,
        simplex: tuple[int, ...],
        old: int,
        new: int,
        expected: tuple[tuple[int, ...], int],
    ) -> None:
        """Test the sorted image and the sign of the sorting permutation."""
        assert relabel_sign(simplex, old, new) == expected


class TestSimplicialComplex:
    """Test suite for SimplicialComplex."""

    def test_from_maximal_closes_under_faces(self) -> None:
        """Test the face closure of a triangle with a dangling edge."""
        # Act
        complex = SimplicialComplex.from_maximal([(0, 1, 2), (2, 3)])

        # Assert
        assert len(complex) == 9
        assert complex.dimension == 2
        assert complex.skeleton(1) == [(0, 1), (0, 2), (1, 2), (2, 3)]
        assert _euler_characteristic(complex) == 1
        assert (1, 2) in complex
        assert (1, 3) not in complex

    def test_cofacets_in_canonical_order(self) -> None:
        """Test the cofacet lookup of a vertex."""
        complex = SimplicialComplex.from_maximal([(0, 1, 2), (2, 3)])

        assert complex.cofacets((2,)) == [(0, 2), (1, 2), (2, 3)]
        assert complex.cofacets((0, 1, 2)) == []

    def test_facet_pairs(self) -> None:
        """Test that every codimension-one pair is listed once."""
        complex = SimplicialComplex.from_maximal([(0, 1, 2)])

        pairs = list(complex.facet_pairs())

        assert len(pairs) == 9
        assert ((0, 2), (0, 1, 2)) in pairs

    def test_missing_face_is_rejected(self) -> None:
        """Test that a set of simplices must be closed under faces."""
        with pytest.raises(InvariantViolation, match="missing") as exc_info:
            SimplicialComplex(((0,), (0, 1)))

        assert exc_info.value.entity == (0, 1)

    def test_empty_complex(self) -> None:
        """Test the complex with no simplices."""
        complex = SimplicialComplex(())

        assert complex.dimension == -1
        assert _euler_characteristic(complex) == 0
