"""Sparse column reduction over a prime field.

Columns are ``{row: value}`` dictionaries holding nonzero residues. The
reduction runs left to right; the pivot of a column is its lowest (largest
row index) nonzero entry, and a column is cleared by adding multiples of
earlier reduced columns that own the same pivot.
"""

from collections.abc import Sequence

from prescomplex.core.field import PrimeField
from prescomplex.utils.monitoring import OperationCounter

Column = dict[int, int]


def low(column: Column) -> int | None:
    """Lowest nonzero row of a column, or None for the zero column."""
    return max(column) if column else None


def add_scaled(
    target: Column,
    source: Column,
    scalar: int,
    field: PrimeField,
    counter: OperationCounter | None = None,
) -> None:
    """``target += scalar * source`` in place, dropping cancelled entries."""
    for row, value in source.items():
        updated = (target.get(row, 0) + scalar * value) % field.p
        if updated:
            target[row] = updated
        else:
            target.pop(row, None)
    if counter is not None:
        counter.column_addition(len(source))


def reduce_columns(
    columns: Sequence[Column],
    field: PrimeField,
    counter: OperationCounter | None = None,
) -> dict[int, int]:
    """Column-reduce in place.

    Args:
        columns: Columns in processing order; mutated into reduced form
        field: Coefficient field
        counter: Optional operation counter

    Returns:
        Map from pivot row to the index of the column owning it
    """
    pivots: dict[int, int] = {}
    for j, column in enumerate(columns):
        pivot = low(column)
        while pivot is not None and pivot in pivots:
            owner = columns[pivots[pivot]]
            scalar = field.neg(field.div(column[pivot], owner[pivot]))
            add_scaled(column, owner, scalar, field, counter)
            pivot = low(column)
        if pivot is not None:
            pivots[pivot] = j
    return pivots
