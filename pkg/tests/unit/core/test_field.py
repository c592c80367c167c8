"""Tests for prime field arithmetic."""

import numpy as np
import pytest

from prescomplex.core.field import FieldElement, PrimeField


class TestPrimeField:
    """Test suite for PrimeField."""

    @pytest.mark.parametrize("p", [0, 1, 4, 6, 9])
    def test_rejects_non_primes(self, p: int) -> None:
        """Test that a non-prime characteristic is rejected."""
        with pytest.raises(ValueError, match="must be prime"):
            PrimeField(p)

    def test_default_is_gf2(self) -> None:
        """Test that the default field is GF(2)."""
        assert PrimeField().p == 2
        assert repr(PrimeField()) == "GF(2)"

    def test_scalar_arithmetic_mod_5(self) -> None:
        """Test the scalar operations modulo 5."""
        # Arrange
        field = PrimeField(5)

        # Assert
        assert field.add(3, 4) == 2
        assert field.sub(1, 3) == 3
        assert field.mul(3, 4) == 2
        assert field.neg(2) == 3
        assert field.inv(2) == 3
        assert field.div(1, 3) == 2

    def test_inverse_of_zero_raises(self) -> None:
        """Test that zero has no inverse."""
        with pytest.raises(ZeroDivisionError):
            PrimeField(3).inv(6)

    def test_matmul_and_rank(self) -> None:
        """Test matrix product and rank over GF(2)."""
        # Arrange
        field = PrimeField(2)
        a = np.array([[1, 1], [1, 1]])

        # Act
        square = field.matmul(a, a)

        # Assert
        assert not square.any()
        assert field.rank(a) == 1
        assert field.rank(np.zeros((0, 3))) == 0

    def test_rank_depends_on_the_characteristic(self) -> None:
        """Test that the same integer matrix has different ranks over different fields."""
        matrix = [[1, 1], [1, -1]]

        assert PrimeField(2).rank(matrix) == 1
        assert PrimeField(3).rank(matrix) == 2

    def test_array_reduces_values(self) -> None:
        """Test that galois arrays are reduced modulo p."""
        array = PrimeField(3).array([[4, -1]])

        assert np.array_equal(np.asarray(array), np.array([[1, 2]]))


class TestFieldElement:
    """Test suite for FieldElement."""

    def test_operator_syntax(self) -> None:
        """Test arithmetic operators on residues."""
        # Arrange
        field = PrimeField(7)
        a, b = field.element(3), field.element(5)

        # Assert
        assert int(a + b) == 1
        assert int(a - b) == 5
        assert int(a * b) == 1
        assert int(a / b) == 2
        assert int(-a) == 4
        assert int(a.inverse()) == 5
        assert int(2 * a) == 6

    def test_mixed_fields_are_rejected(self) -> None:
        """Test that elements of different fields do not combine."""
        with pytest.raises(ValueError, match="cannot mix"):
            _ = PrimeField(3).element(1) + PrimeField(5).element(1)

    def test_out_of_range_residue(self) -> None:
        """Test that residues must lie in [0, p)."""
        with pytest.raises(ValueError, match="out of range"):
            FieldElement(3, PrimeField(3))

    def test_truthiness(self) -> None:
        """Test that zero is falsy."""
        assert not PrimeField(2).element(2)
        assert PrimeField(2).element(1)
