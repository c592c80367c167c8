"""Prime field arithmetic.

Scalars are plain integer residues in ``[0, p)``; :class:`PrimeField` owns the
arithmetic and hands out galois array classes for dense linear algebra.
:class:`FieldElement` wraps a residue with its field for API callers who want
operator syntax.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any

import galois
import numpy as np
import numpy.typing as npt


@dataclass(frozen=True)
class PrimeField:
    """The field of integers modulo a prime ``p``."""

    p: int = 2

    def __post_init__(self) -> None:
        if self.p < 2 or not galois.is_prime(self.p):
            raise ValueError(f"field characteristic must be prime, got {self.p}")

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def norm(self, value: int) -> int:
        return value % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        """Multiplicative inverse of a nonzero residue.

        Raises:
            ZeroDivisionError: If ``a`` is zero modulo ``p``
        """
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def element(self, value: int) -> FieldElement:
        return FieldElement(value % self.p, self)

    @cached_property
    def gf(self) -> Any:
        """The galois ``FieldArray`` subclass for this field."""
        return galois.GF(self.p)

    def array(self, values: npt.ArrayLike) -> Any:
        """Reduce integer data modulo ``p`` and wrap it as a galois array."""
        data = np.asarray(values, dtype=np.int64) % self.p
        return self.gf(data)

    def zeros(self, rows: int, cols: int) -> npt.NDArray[np.int64]:
        return np.zeros((rows, cols), dtype=np.int64)

    def reduce(self, values: npt.ArrayLike) -> npt.NDArray[np.int64]:
        """Plain int64 copy of ``values`` reduced modulo ``p``."""
        return np.asarray(values, dtype=np.int64) % self.p

    def matmul(
        self, a: npt.ArrayLike, b: npt.ArrayLike
    ) -> npt.NDArray[np.int64]:
        """Matrix product over the field on plain integer arrays."""
        left = np.asarray(a, dtype=np.int64)
        right = np.asarray(b, dtype=np.int64)
        return (left @ right) % self.p

    def rank(self, matrix: npt.ArrayLike) -> int:
        data = np.asarray(matrix, dtype=np.int64)
        if data.size == 0:
            return 0
        return int(np.linalg.matrix_rank(self.array(data)))


@dataclass(frozen=True)
class FieldElement:
    """A residue together with the field it lives in."""

    value: int
    field: PrimeField

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.p:
            raise ValueError(
                f"residue {self.value} out of range for GF({self.field.p})"
            )

    def _coerce(self, other: FieldElement | int) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(
                    f"cannot mix GF({self.field.p}) and GF({other.field.p})"
                )
            return other.value
        return other % self.field.p

    def __add__(self, other: FieldElement | int) -> FieldElement:
        return self.field.element(self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other: FieldElement | int) -> FieldElement:
        return self.field.element(self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other: FieldElement | int) -> FieldElement:
        return self.field.element(self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other: FieldElement | int) -> FieldElement:
        return self.field.element(self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other: FieldElement | int) -> FieldElement:
        return self.field.element(self.field.div(self.value, self._coerce(other)))

    def __neg__(self) -> FieldElement:
        return self.field.element(self.field.neg(self.value))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def inverse(self) -> FieldElement:
        return self.field.element(self.field.inv(self.value))

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"
