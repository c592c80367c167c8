"""Tests for the brute-force pointwise verifiers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prescomplex.core.barcode import Barcode, Interval
from prescomplex.core.field import PrimeField
from prescomplex.core.graded import IntMatrix, RawComplex
from prescomplex.utils.generators import random_raw_complex
from prescomplex.utils.oracle import (
    pointwise_barcode,
    pointwise_homology_barcode,
    pointwise_homology_dims,
    random_invertible,
)


def _zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def _inverse(matrix: IntMatrix, field: PrimeField) -> IntMatrix:
    if matrix.shape[0] == 0:
        return matrix
    return np.asarray(np.linalg.inv(field.array(matrix)), dtype=np.int64)


def _change_bases(raw: RawComplex, rng: np.random.Generator) -> RawComplex:
    """The same complex written in random bases of every ``L_i``, ``M_i`` and ``N_i``."""
    field = raw.field
    dims = (raw.dims_l, raw.dims_m, raw.dims_n)
    bases = [[random_invertible(d, field, rng) for d in module_dims] for module_dims in dims]
    inverses = [[_inverse(t, field) for t in module_bases] for module_bases in bases]

    def conjugate(maps: tuple[IntMatrix, ...], module: int) -> list[IntMatrix]:
        return [
            field.matmul(field.matmul(bases[module][i + 1], a), inverses[module][i])
            for i, a in enumerate(maps)
        ]

    F = [
        field.matmul(field.matmul(bases[1][i], f), inverses[0][i]) for i, f in enumerate(raw.F)
    ]
    G = [
        field.matmul(field.matmul(bases[2][i], g), inverses[1][i]) for i, g in enumerate(raw.G)
    ]
    return RawComplex.build(
        dims, (conjugate(raw.L, 0), conjugate(raw.M, 1), conjugate(raw.N, 2)), F, G, field
    )


class TestPointwiseBarcode:
    """Test suite for pointwise_barcode."""

    @pytest.mark.parametrize(
        ("dims", "maps", "expected"),
        [
            ([1, 1, 1], [[[1]], [[1]]], [Interval(0)]),
            ([1, 1, 0], [[[1]], _zeros(0, 1)], [Interval(0, 2)]),
            ([1, 1], [[[0]]], [Interval(0, 1), Interval(1)]),
            ([2, 1], [[[1, 1]]], [Interval(0), Interval(0, 1)]),
            ([0, 0], [_zeros(0, 0)], []),
        ],
    )
    def test_small_modules(
        self, dims: list[int], maps: list[object], expected: list[Interval]
    ) -> None:
        """Test rank inclusion-exclusion on small modules over GF(2)."""
        assert pointwise_barcode(dims, maps) == Barcode.from_intervals(expected)

    def test_degree_label(self) -> None:
        """Test that every bar carries the requested degree."""
        barcode = pointwise_barcode([1], [], degree=2)

        assert barcode.to_lines() == ["2 0 inf"]

    def test_scalar_maps_over_gf3(self) -> None:
        """Test that a nonzero scalar is an isomorphism."""
        barcode = pointwise_barcode([1, 1], [[[2]]], field=PrimeField(3))

        assert barcode.intervals() == [Interval(0)]

    def test_invalid_shape(self) -> None:
        """Test that maps must match the dimensions."""
        with pytest.raises(ValueError):
            pointwise_barcode([1, 2], [[[1, 1, 1]]])


class TestPointwiseHomology:
    """Test suite for pointwise homology of raw complexes."""

    def test_cycle_outside_the_image(self) -> None:
        """Test that the complement of im F survives forever."""
        # Arrange
        raw = RawComplex.build(
            ([1, 1], [2, 2], [0, 0]),
            ([[[1]]], [np.eye(2, dtype=np.int64)], [_zeros(0, 0)]),
            F=[[[1], [0]], [[1], [0]]],
            G=[_zeros(0, 2), _zeros(0, 2)],
        )

        # Act
        dims = pointwise_homology_dims(raw)
        barcode = pointwise_homology_barcode(raw, degree=1)

        # Assert
        assert dims == [1, 1]
        assert barcode.to_lines() == ["1 0 inf"]

    def test_class_killed_by_the_image(self) -> None:
        """Test that a class dies once it becomes a boundary."""
        raw = RawComplex.build(
            ([0, 1], [1, 1], [0, 0]),
            ([_zeros(1, 0)], [[[1]]], [_zeros(0, 0)]),
            F=[_zeros(1, 0), [[1]]],
            G=[_zeros(0, 1), _zeros(0, 1)],
        )

        assert pointwise_homology_dims(raw) == [1, 0]
        assert pointwise_homology_barcode(raw).to_lines() == ["0 0 1"]

    @given(seed=st.integers(0, 2**32 - 1), p=st.sampled_from([2, 3, 5]))
    @settings(max_examples=40, deadline=None)
    def test_invariant_under_change_of_basis(self, seed: int, p: int) -> None:
        """Test that the barcode does not depend on the bases of the pointwise spaces."""
        # Arrange
        rng = np.random.default_rng(seed)
        raw = random_raw_complex(rng, m=4, max_dim=3, field=PrimeField(p))

        # Act
        changed = _change_bases(raw, rng).validate()

        # Assert
        assert pointwise_homology_dims(changed) == pointwise_homology_dims(raw)
        assert pointwise_homology_barcode(changed, degree=1) == pointwise_homology_barcode(
            raw, degree=1
        )


class TestRandomInvertible:
    """Test suite for random_invertible."""

    @pytest.mark.parametrize(("n", "p"), [(0, 2), (1, 2), (3, 2), (4, 5)])
    def test_full_rank(self, rng: np.random.Generator, n: int, p: int) -> None:
        """Test that the matrix is square and invertible."""
        field = PrimeField(p)

        matrix = random_invertible(n, field, rng)

        assert matrix.shape == (n, n)
        assert field.rank(matrix) == n
