"""Repair presentations of a complex into a complex of presentations.

Presentations of two composable module maps with zero composite need not
compose to zero at the level of generators: a generator ``[a, b)`` may map
onto a bar ``[c, d)`` with ``c < d <= a``, which is invisible on the
modules but nonzero on free generators. For every column carrying such a
defect a zero-length generator ``[a, a)`` is added to the middle
presentation; it absorbs the defect and leaves all barcodes unchanged apart
from empty bars.
"""

from prescomplex.config.logging import get_logger
from prescomplex.core.barcode import Interval
from prescomplex.core.graded import AnnotatedMatrix, compose
from prescomplex.core.validator import NotAComplexError

logger = get_logger(__name__)


def complexify_pair(
    f0: AnnotatedMatrix, g0: AnnotatedMatrix
) -> tuple[AnnotatedMatrix, AnnotatedMatrix]:
    """Turn a pair of presentations of a complex into a complex of presentations.

    Args:
        f0: Presentation of ``L -> M``
        g0: Presentation of ``M -> N`` sharing the middle generators of ``f0``

    Returns:
        ``(f0', g0')`` with ``compose(g0', f0')`` identically zero

    Raises:
        AnnotationMismatch: If ``f0`` rows and ``g0`` columns differ
        NotAComplexError: If the presented composite is not zero; names the
            offending (row, column) pair
    """
    f0.validate()
    g0.validate()
    composite = compose(g0, f0)
    if composite.is_zero():
        return f0, g0

    new_rows: list[dict[int, int]] = []
    new_cols: list[dict[int, int]] = []
    annotations: list[Interval] = []
    for j, column in enumerate(composite.columns):
        if not column:
            continue
        col_bar = f0.col_ann[j]
        for k, _ in column:
            row_bar = g0.row_ann[k]
            if not row_bar.death <= col_bar.birth:
                raise NotAComplexError(
                    f"composite maps column {j} {col_bar} onto row {k} {row_bar}, "
                    "which survives past the column's birth",
                    entity=(k, j),
                )
        annotations.append(Interval(col_bar.birth, col_bar.birth))
        new_rows.append({j: 1})
        new_cols.append({k: f0.field.neg(value) for k, value in column})

    repaired_f0 = f0.with_rows(annotations, new_rows)
    repaired_g0 = g0.with_columns(annotations, new_cols)
    logger.info(
        "complex_repaired",
        added_generators=len(annotations),
        middle_generators=repaired_f0.n_rows,
    )
    return repaired_f0, repaired_g0
