"""Tests for repairing presentation pairs into complexes."""

import numpy as np
import pytest

from prescomplex.core.barcode import Barcode, Interval
from prescomplex.core.complexify import complexify_pair
from prescomplex.core.field import PrimeField
from prescomplex.core.graded import AnnotatedMatrix, compose
from prescomplex.core.homology import pres_hom
from prescomplex.core.presentation import pres_complex
from prescomplex.core.validator import AnnotationMismatch, NotAComplexError
from prescomplex.utils.generators import random_raw_complex
from prescomplex.utils.oracle import pointwise_homology_barcode


@pytest.fixture
def defective_pair() -> tuple[AnnotatedMatrix, AnnotatedMatrix]:
    """``[1,2) -> [0,2) -> [0,1)``: zero on modules, nonzero on generators."""
    f0 = AnnotatedMatrix.from_dense([[1]], row_ann=[Interval(0, 2)], col_ann=[Interval(1, 2)])
    g0 = AnnotatedMatrix.from_dense([[1]], row_ann=[Interval(0, 1)], col_ann=[Interval(0, 2)])
    return f0, g0


class TestComplexifyPair:
    """Test suite for complexify_pair."""

    def test_adds_a_zero_length_generator(
        self, defective_pair: tuple[AnnotatedMatrix, AnnotatedMatrix]
    ) -> None:
        """Test the repair of a single defective column."""
        # Arrange
        f0, g0 = defective_pair

        # Act
        repaired_f0, repaired_g0 = complexify_pair(f0, g0)

        # Assert
        assert repaired_f0.row_ann == (Interval(0, 2), Interval(1, 1))
        assert np.array_equal(repaired_f0.to_dense(), [[1], [1]])
        assert repaired_g0.col_ann == (Interval(0, 2), Interval(1, 1))
        assert np.array_equal(repaired_g0.to_dense(), [[1, 1]])
        assert compose(repaired_g0, repaired_f0).is_zero()
        repaired_f0.validate()
        repaired_g0.validate()

    def test_repair_does_not_change_homology(
        self, defective_pair: tuple[AnnotatedMatrix, AnnotatedMatrix]
    ) -> None:
        """Test that only an empty bar is added to the middle."""
        repaired = complexify_pair(*defective_pair)

        assert pres_hom(*repaired, keep_empty=False) == Barcode()

    def test_complex_is_returned_unchanged(
        self, sheaf_coboundaries: tuple[AnnotatedMatrix, AnnotatedMatrix]
    ) -> None:
        """Test that a pair that already composes to zero is not touched."""
        f0, g0 = sheaf_coboundaries

        assert complexify_pair(f0, g0) == (f0, g0)

    def test_rejects_a_pair_that_is_not_a_complex(self) -> None:
        """Test that a composite surviving past the column's birth is an error."""
        # Arrange
        f0 = AnnotatedMatrix.from_dense([[1]], row_ann=[Interval(0)], col_ann=[Interval(1)])
        g0 = AnnotatedMatrix.from_dense([[1]], row_ann=[Interval(0)], col_ann=[Interval(0)])

        # Act
        with pytest.raises(NotAComplexError) as exc_info:
            complexify_pair(f0, g0)

        # Assert
        assert exc_info.value.entity == (0, 0)

    def test_rejects_mismatched_middle(self) -> None:
        """Test that the middle generators must agree."""
        f0 = AnnotatedMatrix.zeros([Interval(0)], [Interval(0)])
        g0 = AnnotatedMatrix.zeros([Interval(0)], [Interval(1)])

        with pytest.raises(AnnotationMismatch):
            complexify_pair(f0, g0)

    def test_repair_over_gf3_negates_the_defect(self) -> None:
        """Test that new columns of g0 carry minus the composite."""
        # Arrange
        f0 = AnnotatedMatrix.from_dense(
            [[1]], row_ann=[Interval(0, 2)], col_ann=[Interval(1, 2)], field=PrimeField(3)
        )
        g0 = AnnotatedMatrix.from_dense(
            [[2]], row_ann=[Interval(0, 1)], col_ann=[Interval(0, 2)], field=PrimeField(3)
        )

        # Act
        repaired_f0, repaired_g0 = complexify_pair(f0, g0)

        # Assert
        assert np.array_equal(repaired_g0.to_dense(), [[2, 1]])
        assert compose(repaired_g0, repaired_f0).is_zero()

    def test_random_complexes_after_repair(self, rng: np.random.Generator) -> None:
        """Test repaired random complexes against the pointwise oracle."""
        for _ in range(15):
            raw = random_raw_complex(rng, m=4, max_dim=3)
            f0, g0 = complexify_pair(*pres_complex(raw))

            assert compose(g0, f0).is_zero()
            assert pres_hom(f0, g0, keep_empty=False) == pointwise_homology_barcode(raw)

