"""Tests for persistent sheaf cohomology."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prescomplex.core.barcode import Barcode, Interval
from prescomplex.core.simplicial import SimplicialComplex
from prescomplex.core.validator import InvariantViolation
from prescomplex.pipelines.sheaf import (
    SheafInstance,
    assemble_local_presentations,
    build_cochain_raw,
    interval_sheaf,
    local_presentations,
    persistent_sheaf_cohomology,
)
from prescomplex.utils.generators import (
    conjugate_sheaf,
    erdos_renyi_sheaf,
    random_interval_sheaf,
)
from prescomplex.utils.oracle import pointwise_homology_barcode

HOLLOW_TRIANGLE = SimplicialComplex.from_maximal([(0, 1), (1, 2), (0, 2)])


class TestSheafInstance:
    """Test suite for SheafInstance validation."""

    def test_constant_sheaf(self) -> None:
        """Test the constant sheaf helper."""
        sheaf = SheafInstance.constant(HOLLOW_TRIANGLE, m=2)

        assert sheaf.size() == 18
        assert np.array_equal(sheaf.restriction((0,), (0, 1), 1), [[1]])
        assert np.array_equal(sheaf.step((0, 2), 1), [[1]])

    def test_missing_stalk(self) -> None:
        """Test that every simplex needs m + 1 stalk dimensions."""
        with pytest.raises(InvariantViolation, match="stalk errors") as exc_info:
            SheafInstance(
                complex=SimplicialComplex.from_maximal([(0, 1)]),
                m=0,
                stalks={(0,): (1,), (1,): (1,)},
            )

        assert len(exc_info.value.errors) == 1

    def test_restriction_on_a_non_facet(self) -> None:
        """Test that restrictions live on codimension-one pairs."""
        with pytest.raises(InvariantViolation, match="codimension-one") as exc_info:
            SheafInstance(
                complex=SimplicialComplex.from_maximal([(0, 1)]),
                m=0,
                stalks={(0,): (1,), (1,): (1,), (0, 1): (1,)},
                restrictions={((0,), (1,), 0): [[1]]},
            )

        assert exc_info.value.entity == ((0,), (1,), 0)

    def test_restriction_shape(self) -> None:
        """Test that a restriction must match the stalks it connects."""
        with pytest.raises(InvariantViolation, match="shape"):
            SheafInstance(
                complex=SimplicialComplex.from_maximal([(0, 1)]),
                m=0,
                stalks={(0,): (1,), (1,): (1,), (0, 1): (2,)},
                restrictions={((0,), (0, 1), 0): [[1]]},
            )

    def test_interval_sheaf_rejects_late_deaths(self) -> None:
        """Test that finite intervals must end by m."""
        complex = SimplicialComplex.from_maximal([(0,)])

        with pytest.raises(InvariantViolation, match="ends after") as exc_info:
            interval_sheaf(complex, {(0,): Interval(0, 5)}, m=3)

        assert exc_info.value.entity == (0,)

    def test_interval_sheaf_skips_illegal_restrictions(self) -> None:
        """Test that a coface outliving its face gets a zero restriction."""
        complex = SimplicialComplex.from_maximal([(0, 1)])
        intervals = {(0,): Interval(0, 2), (1,): Interval(0), (0, 1): Interval(0, 3)}

        sheaf = interval_sheaf(complex, intervals, m=3)

        assert ((0,), (0, 1), 0) not in sheaf.restrictions
        assert np.array_equal(sheaf.restriction((1,), (0, 1), 0), [[1]])


class TestLocalPresentations:
    """Test suite for the per-simplex presentations."""

    def test_triangle_modules(self, triangle_sheaf: SheafInstance) -> None:
        """Test that every interval module has a single generator."""
        local = local_presentations(triangle_sheaf)

        assert local.modules[(0,)] == (Interval(2, 6),)
        assert local.modules[(0, 1, 2)] == (Interval(0, 3),)
        assert local.compressed_size() == 7

    def test_assembled_coboundaries(self, triangle_sheaf: SheafInstance) -> None:
        """Test the gluing order: simplices first, local generators second."""
        # Act
        f0, g0 = assemble_local_presentations(local_presentations(triangle_sheaf), 1)

        # Assert
        assert f0.col_ann == (Interval(2, 6), Interval(1, 5), Interval(1, 7))
        assert f0.row_ann == (Interval(0, 5), Interval(1, 6), Interval(0, 5))
        assert g0.col_ann == f0.row_ann
        assert g0.row_ann == (Interval(0, 3),)
        assert np.array_equal(f0.to_dense(), [[1, 1, 0], [1, 0, 1], [0, 1, 1]])

    @given(
        seed=st.integers(0, 2**32 - 1),
        m=st.integers(1, 5),
        dim=st.integers(1, 3),
        conjugate=st.booleans(),
    )
    @settings(max_examples=25, deadline=None)
    def test_full_length_stalks_compress_by_the_index_count(
        self, seed: int, m: int, dim: int, conjugate: bool
    ) -> None:
        """Test that stalks alive on every index keep one generator per basis vector."""
        # Arrange
        rng = np.random.default_rng(seed)
        sheaf = SheafInstance.constant(HOLLOW_TRIANGLE, m=m, dim=dim, field_prime=3)
        if conjugate:
            sheaf = conjugate_sheaf(rng, sheaf)

        # Act
        local = local_presentations(sheaf)

        # Assert
        assert local.compressed_size() == dim * len(HOLLOW_TRIANGLE)
        assert local.compressed_size() * (m + 1) == sheaf.size()
        assert local.compressed_size() <= sheaf.size() / m
        assert all(bars == (Interval(0),) * dim for bars in local.modules.values())


class TestPersistentSheafCohomology:
    """Test suite for persistent_sheaf_cohomology."""

    @pytest.mark.parametrize("method", ["global", "local"])
    def test_triangle_sheaf(self, triangle_sheaf: SheafInstance, method: str) -> None:
        """Test the first cohomology of the triangle interval sheaf."""
        barcode = persistent_sheaf_cohomology(triangle_sheaf, 1, method=method, keep_empty=False)

        assert barcode.to_lines() == ["1 0 1", "1 3 5"]

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_triangle_sheaf_against_oracle(self, triangle_sheaf: SheafInstance, k: int) -> None:
        """Test every degree against the pointwise cochain complex."""
        expected = pointwise_homology_barcode(build_cochain_raw(triangle_sheaf, k), degree=k)

        assert persistent_sheaf_cohomology(triangle_sheaf, k, keep_empty=False) == expected

    @pytest.mark.parametrize("method", ["global", "local"])
    def test_constant_sheaf_on_a_circle(self, method: str) -> None:
        """Test that the constant sheaf sees one component and one loop."""
        sheaf = SheafInstance.constant(HOLLOW_TRIANGLE, m=2)

        h0 = persistent_sheaf_cohomology(sheaf, 0, method=method)
        h1 = persistent_sheaf_cohomology(sheaf, 1, method=method)

        assert h0.to_lines() == ["0 0 inf"]
        assert h1.to_lines() == ["1 0 inf"]

    def test_degree_out_of_range(self, triangle_sheaf: SheafInstance) -> None:
        """Test that degrees outside the complex have no bars."""
        assert persistent_sheaf_cohomology(triangle_sheaf, 3) == Barcode()
        assert persistent_sheaf_cohomology(triangle_sheaf, -1) == Barcode()

    def test_unknown_method(self, triangle_sheaf: SheafInstance) -> None:
        """Test that only the two routes are accepted."""
        with pytest.raises(ValueError, match="unknown method"):
            persistent_sheaf_cohomology(triangle_sheaf, 1, method="sideways")  # type: ignore[arg-type]

    def test_threads_do_not_change_the_result(self, rng: np.random.Generator) -> None:
        """Test that the parallel local route matches the sequential one."""
        sheaf = erdos_renyi_sheaf(rng, n_vertices=8, m=5)

        for k in (0, 1):
            sequential = persistent_sheaf_cohomology(sheaf, k, method="local", threads=1)
            parallel = persistent_sheaf_cohomology(sheaf, k, method="local", threads=3)
            assert parallel == sequential

    @given(
        seed=st.integers(0, 2**32 - 1),
        p=st.sampled_from([2, 3]),
        conjugate=st.booleans(),
    )
    @settings(max_examples=25, deadline=None)
    def test_random_sheaves_both_methods_against_oracle(
        self, seed: int, p: int, conjugate: bool
    ) -> None:
        """Test random interval sums, optionally in random bases, by both routes."""
        # Arrange
        rng = np.random.default_rng(seed)
        complex = SimplicialComplex.from_maximal([(0, 1, 2), (2, 3)])
        sheaf = random_interval_sheaf(
            rng, complex, m=4, labels=2, field_prime=p, conjugate=conjugate
        )

        for k in (0, 1, 2):
            # Act
            expected = pointwise_homology_barcode(build_cochain_raw(sheaf, k), degree=k)
            by_global = persistent_sheaf_cohomology(sheaf, k, method="global", keep_empty=False)
            by_local = persistent_sheaf_cohomology(sheaf, k, method="local", keep_empty=False)

            # Assert
            assert by_global == expected
            assert by_local == expected
