"""Homology barcodes of complexes of presentations.

Given presentations ``f0: P0 -> Q0`` and ``g0: Q0 -> R0`` that compose to
zero, the middle homology ``ker / im`` is presented as follows.

1. The kernel of ``(g0 | -r)``, where ``r`` pairs each finite row of ``g0``
   with its relation, is computed by a column reduction with columns
   ordered by degree. Zero columns after reduction are the kernel
   generators.
2. The stacked matrix ``[[f0, -q], [0, -g1]]`` maps into the same
   generators. Rows of nonzero reduced columns are deleted and the kept
   rows become the coordinates in the kernel basis without further
   arithmetic.
3. A second column reduction pairs each kept row with the degree of its
   pivot column. Unpaired rows give infinite bars.
"""

from dataclasses import dataclass
from typing import Literal

from prescomplex.config.logging import get_logger
from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import Barcode, Degree, Interval
from prescomplex.core.graded import AnnotatedMatrix, compose
from prescomplex.core.reduction import Column, low, reduce_columns
from prescomplex.core.validator import InvariantViolation, NotAComplexError
from prescomplex.utils.monitoring import OperationCounter

logger = get_logger(__name__)


@dataclass(frozen=True)
class _Generator:
    """A generator of ``Q0 (+) R1``: a middle generator or a relation of ``R0``."""

    degree: Degree
    kind: Literal["q", "r"]
    index: int


def pres_hom(
    f0: AnnotatedMatrix,
    g0: AnnotatedMatrix,
    degree_label: int = 0,
    keep_empty: bool | None = None,
    counter: OperationCounter | None = None,
) -> Barcode:
    """Barcode of ``ker psi / im phi`` for a complex of presentations.

    Args:
        f0: Presentation of ``phi: L -> M``
        g0: Presentation of ``psi: M -> N``
        degree_label: Degree attached to every output bar
        keep_empty: Keep zero-length bars; defaults to the configured value
        counter: Optional operation counter

    Returns:
        Barcode of the middle homology

    Raises:
        AnnotationMismatch: If ``f0`` rows and ``g0`` columns differ
        NotAComplexError: If ``compose(g0, f0)`` is not zero
    """
    f0.validate()
    g0.validate()
    if keep_empty is None:
        keep_empty = get_settings().keep_empty
    composite = compose(g0, f0)
    if not composite.is_zero():
        k, j, _ = next(composite.nonzero())
        raise NotAComplexError(
            f"g0 f0 is not zero at ({k}, {j}); run complexify_pair first",
            entity=(k, j),
        )
    field = f0.field
    minus_one = field.neg(1)

    # Generators of Q0 (+) R1 in degree order; they index the columns of
    # (g0 | -r) and the rows of the stacked matrix alike.
    generators = [_Generator(bar.birth, "q", q) for q, bar in enumerate(g0.col_ann)]
    generators += [
        _Generator(bar.death, "r", k) for k, bar in enumerate(g0.row_ann) if bar.is_finite
    ]
    generators.sort(key=lambda gen: gen.degree)
    position = {(gen.kind, gen.index): pos for pos, gen in enumerate(generators)}

    codomain_order = sorted(range(g0.n_rows), key=lambda k: g0.row_ann[k].birth)
    codomain_position = {k: pos for pos, k in enumerate(codomain_order)}
    g0_by_birth = g0.permute_rows(codomain_order)
    kernel_columns: list[Column] = []
    for gen in generators:
        if gen.kind == "q":
            kernel_columns.append(dict(g0_by_birth.columns[gen.index]))
        else:
            kernel_columns.append({codomain_position[gen.index]: minus_one})
    reduce_columns(kernel_columns, field, counter)

    kept = [pos for pos, column in enumerate(kernel_columns) if not column]
    row_of = {pos: row for row, pos in enumerate(kept)}

    stacked: list[tuple[Degree, Column]] = []
    for j, bar in enumerate(f0.col_ann):
        column = {position[("q", k)]: value for k, value in f0.columns[j]}
        stacked.append((bar.birth, column))
    finite_rows = [k for k, bar in enumerate(g0.row_ann) if bar.is_finite]
    for q, bar in enumerate(g0.col_ann):
        if not bar.is_finite:
            continue
        column = {position[("q", q)]: minus_one}
        g0_column = dict(g0.columns[q])
        for k in finite_rows:
            if k in g0_column:
                column[position[("r", k)]] = field.neg(g0_column[k])
        stacked.append((bar.death, column))

    ordered = sorted(stacked, key=lambda item: item[0])
    degrees = [degree for degree, _ in ordered]
    survivors: list[Column] = [
        {row_of[pos]: value for pos, value in column.items() if pos in row_of}
        for _, column in ordered
    ]
    reduce_columns(survivors, field, counter)
    pivot_degree: dict[int, int] = {}
    for j, column in enumerate(survivors):
        pivot = low(column)
        if pivot is not None:
            pivot_degree[pivot] = int(degrees[j])

    bars = []
    for row, pos in enumerate(kept):
        birth = int(generators[pos].degree)
        if row in pivot_degree:
            bars.append(Interval(birth, pivot_degree[row]))
        else:
            bars.append(Interval(birth))
    barcode = Barcode.from_intervals(bars, degree=degree_label, keep_empty=keep_empty)
    logger.info(
        "homology_computed",
        degree=degree_label,
        kernel_generators=len(kept),
        bars=len(barcode),
    )
    return barcode


def persistence_algorithm(
    f0: AnnotatedMatrix,
    g0: AnnotatedMatrix,
    degree_label: int = 0,
    keep_empty: bool | None = None,
) -> Barcode:
    """Homology of free presentations, i.e. of a filtered chain complex.

    With every annotation infinite this is the standard persistence
    reduction of the boundary matrices ``f0`` (degree ``k + 1``) and ``g0``
    (degree ``k``).

    Raises:
        InvariantViolation: If any annotation has a finite death
    """
    for name, matrix in (("f0", f0), ("g0", g0)):
        for side, annotations in (("row", matrix.row_ann), ("column", matrix.col_ann)):
            for index, bar in enumerate(annotations):
                if bar.is_finite:
                    raise InvariantViolation(
                        f"{name} {side} {index} {bar} has a finite death",
                        entity=(name, side, index),
                    )
    return pres_hom(f0, g0, degree_label, keep_empty)
