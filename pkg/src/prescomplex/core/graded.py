"""Degree-annotated matrices and pointwise persistence modules.

An :class:`AnnotatedMatrix` stores the generator matrix ``f0`` of a morphism
between canonical presentations: every row and column carries the interval
``[birth, death)`` of the elementary presentation it belongs to. Relations,
the relation matrix ``f1`` and the canonical maps ``p`` and ``q`` are all
recoverable from the annotations (:func:`derive_relation_matrices`).

The pointwise side (:class:`RawModule`, :class:`RawModuleMorphism`,
:class:`RawComplex`) stores plain matrices per index and is what
:mod:`prescomplex.core.presentation` consumes.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from prescomplex.config.logging import get_logger
from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import INFINITY, Barcode, Degree, Interval
from prescomplex.core.field import PrimeField
from prescomplex.core.validator import (
    AnnotatedMatrixValidator,
    AnnotationMismatch,
    InvariantViolation,
    RawModuleValidator,
)

logger = get_logger(__name__)

IntMatrix = npt.NDArray[np.int64]
SparseColumn = tuple[tuple[int, int], ...]


def _freeze_column(column: Mapping[int, int], field: PrimeField) -> SparseColumn:
    return tuple(
        sorted((row, value % field.p) for row, value in column.items() if value % field.p)
    )


@dataclass(frozen=True)
class AnnotatedMatrix:
    """Sparse field matrix with an interval per row and per column.

    Columns are stored as sorted ``(row, value)`` tuples with nonzero
    residues only; instances are immutable.
    """

    row_ann: tuple[Interval, ...]
    col_ann: tuple[Interval, ...]
    columns: tuple[SparseColumn, ...]
    field: PrimeField = dataclasses.field(default_factory=PrimeField)

    def __post_init__(self) -> None:
        if len(self.columns) != len(self.col_ann):
            raise InvariantViolation(
                f"{len(self.columns)} columns but {len(self.col_ann)} column annotations",
                entity=min(len(self.columns), len(self.col_ann)),
            )
        n_rows = len(self.row_ann)
        for j, column in enumerate(self.columns):
            for row, value in column:
                if not 0 <= row < n_rows:
                    raise InvariantViolation(
                        f"column {j} has an entry in row {row} of {n_rows}",
                        entity=(row, j),
                    )
                if not 0 < value < self.field.p:
                    raise InvariantViolation(
                        f"entry ({row}, {j}) = {value} is not a nonzero residue",
                        entity=(row, j),
                    )

    @classmethod
    def from_columns(
        cls,
        row_ann: Sequence[Interval],
        col_ann: Sequence[Interval],
        columns: Iterable[Mapping[int, int]],
        field: PrimeField | None = None,
    ) -> AnnotatedMatrix:
        """Build from sparse ``{row: value}`` columns; values are reduced mod p."""
        field = field or PrimeField()
        return cls(
            tuple(row_ann),
            tuple(col_ann),
            tuple(_freeze_column(column, field) for column in columns),
            field,
        )

    @classmethod
    def from_dense(
        cls,
        entries: npt.ArrayLike,
        row_ann: Sequence[Interval],
        col_ann: Sequence[Interval],
        field: PrimeField | None = None,
    ) -> AnnotatedMatrix:
        field = field or PrimeField()
        data = np.asarray(entries, dtype=np.int64).reshape(len(row_ann), len(col_ann))
        data = data % field.p
        columns = [
            {int(k): int(data[k, j]) for k in np.flatnonzero(data[:, j])}
            for j in range(data.shape[1])
        ]
        return cls.from_columns(row_ann, col_ann, columns, field)

    @classmethod
    def zeros(
        cls,
        row_ann: Sequence[Interval],
        col_ann: Sequence[Interval],
        field: PrimeField | None = None,
    ) -> AnnotatedMatrix:
        return cls(
            tuple(row_ann), tuple(col_ann), tuple(() for _ in col_ann), field or PrimeField()
        )

    @classmethod
    def identity(
        cls, annotations: Sequence[Interval], field: PrimeField | None = None
    ) -> AnnotatedMatrix:
        return cls(
            tuple(annotations),
            tuple(annotations),
            tuple(((j, 1),) for j in range(len(annotations))),
            field or PrimeField(),
        )

    @property
    def n_rows(self) -> int:
        return len(self.row_ann)

    @property
    def n_cols(self) -> int:
        return len(self.col_ann)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def column(self, j: int) -> dict[int, int]:
        """Mutable copy of column ``j``."""
        return dict(self.columns[j])

    def entry(self, k: int, j: int) -> int:
        return dict(self.columns[j]).get(k, 0)

    def nonzero(self) -> Iterator[tuple[int, int, int]]:
        for j, column in enumerate(self.columns):
            for k, value in column:
                yield k, j, value

    def is_zero(self) -> bool:
        return not any(self.columns)

    def to_dense(self) -> IntMatrix:
        dense = np.zeros(self.shape, dtype=np.int64)
        for k, j, value in self.nonzero():
            dense[k, j] = value
        return dense

    def validate(self, strict: bool = True) -> AnnotatedMatrix:
        """Check the birth rule, and the death rule when ``strict``.

        Returns:
            ``self``, for chaining

        Raises:
            InvariantViolation: Naming the first offending (row, column) pair
        """
        AnnotatedMatrixValidator(strict=strict).validate(self)
        return self

    def with_rows(
        self, annotations: Sequence[Interval], rows: Sequence[Mapping[int, int]]
    ) -> AnnotatedMatrix:
        """Append rows given as ``{column: value}`` maps."""
        columns = [self.column(j) for j in range(self.n_cols)]
        for offset, row in enumerate(rows):
            for j, value in row.items():
                columns[j][self.n_rows + offset] = value
        return AnnotatedMatrix.from_columns(
            self.row_ann + tuple(annotations), self.col_ann, columns, self.field
        )

    def with_columns(
        self, annotations: Sequence[Interval], columns: Sequence[Mapping[int, int]]
    ) -> AnnotatedMatrix:
        """Append columns given as ``{row: value}`` maps."""
        return AnnotatedMatrix(
            self.row_ann,
            self.col_ann + tuple(annotations),
            self.columns + tuple(_freeze_column(column, self.field) for column in columns),
            self.field,
        )

    def permute_columns(self, order: Sequence[int]) -> AnnotatedMatrix:
        """Reorder columns, moving each annotation with its column."""
        return AnnotatedMatrix(
            self.row_ann,
            tuple(self.col_ann[j] for j in order),
            tuple(self.columns[j] for j in order),
            self.field,
        )

    def permute_rows(self, order: Sequence[int]) -> AnnotatedMatrix:
        """Reorder rows so that new row ``i`` is old row ``order[i]``."""
        position = {old: new for new, old in enumerate(order)}
        return AnnotatedMatrix.from_columns(
            tuple(self.row_ann[k] for k in order),
            self.col_ann,
            ({position[k]: v for k, v in column} for column in self.columns),
            self.field,
        )

    def generator_matrix(self) -> DegreeMatrix:
        """``f0`` as a degree-labelled matrix between generator modules."""
        return DegreeMatrix(
            self.to_dense(),
            tuple(interval.birth for interval in self.row_ann),
            tuple(interval.birth for interval in self.col_ann),
            self.field,
        )

    def __str__(self) -> str:
        dense = self.to_dense()
        header = "          " + " ".join(f"{str(c):>8}" for c in self.col_ann)
        lines = [header]
        for k, interval in enumerate(self.row_ann):
            values = " ".join(f"{int(v):>8}" for v in dense[k])
            lines.append(f"{str(interval):>9} {values}")
        return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class DegreeMatrix:
    """Plain matrix whose rows and columns carry generator degrees.

    Entry ``(k, j)`` stands for ``value * t^(col_degrees[j] - row_degrees[k])``.
    """

    entries: IntMatrix
    row_degrees: tuple[Degree, ...]
    col_degrees: tuple[Degree, ...]
    field: PrimeField

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_degrees), len(self.col_degrees))

    def t_power(self, k: int, j: int) -> Degree:
        return self.col_degrees[j] - self.row_degrees[k]

    def is_legal(self) -> bool:
        """Every nonzero entry has a non-negative power of ``t``."""
        for k, j in zip(*np.nonzero(self.entries), strict=True):
            if self.t_power(int(k), int(j)) < 0:
                return False
        return True

    def __matmul__(self, other: DegreeMatrix) -> DegreeMatrix:
        if self.col_degrees != other.row_degrees:
            raise AnnotationMismatch(
                "inner degrees of a graded product differ",
                entity=_first_mismatch(self.col_degrees, other.row_degrees),
            )
        product = self.field.matmul(self.entries, other.entries)
        return DegreeMatrix(product, self.row_degrees, other.col_degrees, self.field)

    def equals(self, other: DegreeMatrix) -> bool:
        return (
            self.row_degrees == other.row_degrees
            and self.col_degrees == other.col_degrees
            and np.array_equal(self.entries % self.field.p, other.entries % other.field.p)
        )


@dataclass(frozen=True, eq=False)
class RelationMatrices:
    """The canonical relation data recovered from an annotated matrix."""

    p: DegreeMatrix
    q: DegreeMatrix
    f1: DegreeMatrix
    f0: DegreeMatrix

    def commutes(self) -> bool:
        """Check ``q f1 = f0 p`` as graded matrices with legal t-powers."""
        parts = (self.p, self.q, self.f1, self.f0)
        if not all(part.is_legal() for part in parts):
            return False
        return (self.q @ self.f1).equals(self.f0 @ self.p)


@dataclass(frozen=True, eq=False)
class RawModule:
    """A persistence module given pointwise up to its stabilization index."""

    m: int
    dims: tuple[int, ...]
    maps: tuple[IntMatrix, ...]
    field: PrimeField = dataclasses.field(default_factory=PrimeField)

    @classmethod
    def build(
        cls,
        dims: Sequence[int],
        maps: Sequence[npt.ArrayLike],
        field: PrimeField | None = None,
    ) -> RawModule:
        field = field or PrimeField()
        matrices = tuple(
            field.reduce(matrix).reshape(dims[i + 1], dims[i])
            for i, matrix in enumerate(maps)
        )
        return cls(len(dims) - 1, tuple(dims), matrices, field)

    def validate(self) -> RawModule:
        RawModuleValidator().validate_module(self)
        return self

    def transition(self, i: int, j: int) -> IntMatrix:
        """The composite structure map from index ``i`` to index ``j``."""
        result = np.eye(self.dims[i], dtype=np.int64)
        for step in range(i, j):
            result = self.field.matmul(self.maps[step], result)
        return result

    def rank(self, i: int, j: int) -> int:
        if i == j:
            return self.dims[i]
        return self.field.rank(self.transition(i, j))


@dataclass(frozen=True, eq=False)
class RawModuleMorphism:
    """Pointwise morphism ``M -> N`` of persistence modules.

    ``A`` and ``B`` are the structure maps of ``M`` and ``N``, ``C[i]`` the
    component ``M_i -> N_i``.
    """

    m: int
    dims_m: tuple[int, ...]
    dims_n: tuple[int, ...]
    A: tuple[IntMatrix, ...]
    B: tuple[IntMatrix, ...]
    C: tuple[IntMatrix, ...]
    field: PrimeField = dataclasses.field(default_factory=PrimeField)

    @classmethod
    def build(
        cls,
        dims_m: Sequence[int],
        dims_n: Sequence[int],
        A: Sequence[npt.ArrayLike],
        B: Sequence[npt.ArrayLike],
        C: Sequence[npt.ArrayLike],
        field: PrimeField | None = None,
    ) -> RawModuleMorphism:
        field = field or PrimeField()
        domain = RawModule.build(dims_m, A, field)
        codomain = RawModule.build(dims_n, B, field)
        components = tuple(
            field.reduce(matrix).reshape(dims_n[i], dims_m[i]) for i, matrix in enumerate(C)
        )
        return cls(
            domain.m, domain.dims, codomain.dims, domain.maps, codomain.maps,
            components, field,
        )

    def domain(self) -> RawModule:
        return RawModule(self.m, self.dims_m, self.A, self.field)

    def codomain(self) -> RawModule:
        return RawModule(self.m, self.dims_n, self.B, self.field)

    def validate(self) -> RawModuleMorphism:
        RawModuleValidator().validate_morphism(self)
        return self


@dataclass(frozen=True, eq=False)
class RawComplex:
    """Pointwise complex ``L -> M -> N`` with connecting maps ``F`` and ``G``."""

    m: int
    dims_l: tuple[int, ...]
    dims_m: tuple[int, ...]
    dims_n: tuple[int, ...]
    L: tuple[IntMatrix, ...]
    M: tuple[IntMatrix, ...]
    N: tuple[IntMatrix, ...]
    F: tuple[IntMatrix, ...]
    G: tuple[IntMatrix, ...]
    field: PrimeField = dataclasses.field(default_factory=PrimeField)

    @classmethod
    def build(
        cls,
        dims: tuple[Sequence[int], Sequence[int], Sequence[int]],
        internal: tuple[
            Sequence[npt.ArrayLike], Sequence[npt.ArrayLike], Sequence[npt.ArrayLike]
        ],
        F: Sequence[npt.ArrayLike],
        G: Sequence[npt.ArrayLike],
        field: PrimeField | None = None,
    ) -> RawComplex:
        field = field or PrimeField()
        first = RawModuleMorphism.build(dims[0], dims[1], internal[0], internal[1], F, field)
        second = RawModuleMorphism.build(dims[1], dims[2], internal[1], internal[2], G, field)
        return cls(
            first.m, first.dims_m, first.dims_n, second.dims_n,
            first.A, first.B, second.B, first.C, second.C, field,
        )

    def first(self) -> RawModuleMorphism:
        return RawModuleMorphism(
            self.m, self.dims_l, self.dims_m, self.L, self.M, self.F, self.field
        )

    def second(self) -> RawModuleMorphism:
        return RawModuleMorphism(
            self.m, self.dims_m, self.dims_n, self.M, self.N, self.G, self.field
        )

    def validate(self) -> RawComplex:
        RawModuleValidator().validate_complex(self)
        return self


def submatrix(
    dense: IntMatrix, rows: Sequence[int], cols: Sequence[int]
) -> IntMatrix:
    """Rows and columns of a dense matrix selected by index lists."""
    return dense[np.ix_(np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp))]


def _first_mismatch(left: Sequence[object], right: Sequence[object]) -> int:
    for index, (a, b) in enumerate(zip(left, right, strict=False)):
        if a != b:
            return index
    return min(len(left), len(right))


def compose(g: AnnotatedMatrix, f: AnnotatedMatrix) -> AnnotatedMatrix:
    """Compose two presented morphisms ``g o f``.

    Degree-legal morphisms compose as plain matrix products because the power
    of ``t`` of every product entry is fixed by the row and column degrees.
    The result satisfies the birth rule but may break the death rule; that
    is exactly the defect :func:`~prescomplex.core.complexify.complexify_pair`
    repairs.

    Args:
        g: Presented morphism ``Q -> R``
        f: Presented morphism ``P -> Q``

    Returns:
        Annotated matrix with rows of ``g`` and columns of ``f``

    Raises:
        AnnotationMismatch: If the columns of ``g`` and the rows of ``f``
            differ; names the first mismatching index
    """
    if g.field != f.field:
        raise AnnotationMismatch(f"cannot compose over {g.field} and {f.field}")
    if g.col_ann != f.row_ann:
        index = _first_mismatch(g.col_ann, f.row_ann)
        raise AnnotationMismatch(
            f"middle generators differ at index {index}: "
            f"{g.n_cols} columns of g vs {f.n_rows} rows of f",
            entity=index,
        )
    columns: list[dict[int, int]] = []
    for f_column in f.columns:
        accumulated: dict[int, int] = {}
        for k, scalar in f_column:
            for row, value in g.columns[k]:
                accumulated[row] = accumulated.get(row, 0) + scalar * value
        columns.append(accumulated)
    return AnnotatedMatrix.from_columns(g.row_ann, f.col_ann, columns, f.field)


def barcode_of_presentation(
    f: AnnotatedMatrix,
    side: Literal["domain", "codomain"] = "domain",
    keep_empty: bool | None = None,
    degree: int = 0,
) -> Barcode:
    """Read the barcode of one end of a canonical presentation.

    Args:
        f: Valid annotated matrix
        side: "domain" reads the column bars, "codomain" the row bars
        keep_empty: Keep zero-length bars; defaults to the configured value
        degree: Degree label attached to every bar

    Returns:
        Barcode of the chosen module
    """
    f.validate()
    if keep_empty is None:
        keep_empty = get_settings().keep_empty
    intervals = f.col_ann if side == "domain" else f.row_ann
    return Barcode.from_intervals(intervals, degree=degree, keep_empty=keep_empty)


def reconstruct_pointwise(
    f: AnnotatedMatrix, horizon: int | None = None
) -> RawModuleMorphism:
    """Expand a presented morphism into pointwise matrices.

    ``M(i)`` is spanned by the columns alive at ``i`` (``birth <= i < death``)
    in column order, ``N(i)`` by the alive rows; structure maps keep the
    surviving generators and forget the dying ones.

    Args:
        f: Valid annotated matrix
        horizon: Stabilization index; defaults to the largest finite index
            among the annotations

    Returns:
        RawModuleMorphism satisfying the commutativity invariant

    Raises:
        InvariantViolation: If ``horizon`` is below an annotation
    """
    f.validate()
    finite = [
        value
        for interval in f.row_ann + f.col_ann
        for value in (interval.birth, interval.death)
        if value != INFINITY
    ]
    latest = int(max(finite, default=0))
    if horizon is None:
        horizon = latest
    elif horizon < latest:
        raise InvariantViolation(
            f"horizon {horizon} is below the annotation index {latest}",
            entity=latest,
        )

    def alive(annotations: Sequence[Interval], i: int) -> list[int]:
        return [n for n, interval in enumerate(annotations) if interval.contains(i)]

    cols = [alive(f.col_ann, i) for i in range(horizon + 1)]
    rows = [alive(f.row_ann, i) for i in range(horizon + 1)]
    dense = f.to_dense()

    def structure_map(active: list[list[int]], i: int) -> IntMatrix:
        target = {g: pos for pos, g in enumerate(active[i + 1])}
        matrix = np.zeros((len(active[i + 1]), len(active[i])), dtype=np.int64)
        for pos, g in enumerate(active[i]):
            if g in target:
                matrix[target[g], pos] = 1
        return matrix

    A = tuple(structure_map(cols, i) for i in range(horizon))
    B = tuple(structure_map(rows, i) for i in range(horizon))
    C = tuple(submatrix(dense, rows[i], cols[i]) for i in range(horizon + 1))
    logger.debug("pointwise_reconstructed", horizon=horizon, generators=f.n_cols)
    return RawModuleMorphism(
        horizon,
        tuple(len(c) for c in cols),
        tuple(len(r) for r in rows),
        A,
        B,
        C,
        f.field,
    )


def derive_relation_matrices(f: AnnotatedMatrix) -> RelationMatrices:
    """Recover ``p``, ``q`` and ``f1`` of the canonical presentations.

    Each finite-death column (row) pairs with one relation of degree equal
    to its death; ``p`` and ``q`` carry a unit at that pairing and ``f1`` is
    ``f0`` restricted to finite-death rows and columns.

    Args:
        f: Valid annotated matrix

    Returns:
        RelationMatrices holding ``p``, ``q``, ``f1`` and ``f0``
    """
    f.validate()
    finite_cols = [j for j, c in enumerate(f.col_ann) if c.is_finite]
    finite_rows = [k for k, r in enumerate(f.row_ann) if r.is_finite]

    def canonical(annotations: tuple[Interval, ...], finite: list[int]) -> DegreeMatrix:
        matrix = np.zeros((len(annotations), len(finite)), dtype=np.int64)
        for rel, gen in enumerate(finite):
            matrix[gen, rel] = 1
        return DegreeMatrix(
            matrix,
            tuple(interval.birth for interval in annotations),
            tuple(annotations[gen].death for gen in finite),
            f.field,
        )

    dense = f.to_dense()
    f1 = DegreeMatrix(
        submatrix(dense, finite_rows, finite_cols),
        tuple(f.row_ann[k].death for k in finite_rows),
        tuple(f.col_ann[j].death for j in finite_cols),
        f.field,
    )
    return RelationMatrices(
        p=canonical(f.col_ann, finite_cols),
        q=canonical(f.row_ann, finite_rows),
        f1=f1,
        f0=f.generator_matrix(),
    )
