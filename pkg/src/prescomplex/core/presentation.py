"""Canonical presentations from pointwise matrices.

The presenter walks the indices left to right. At each step it
column-reduces the (already basis-changed) structure matrix of every
module, mirrors each column operation onto the annotated matrices that
touch that module, records deaths for columns that vanish, and moves to the
next index with the basis formed by the reduced columns plus unit vectors
for the non-pivot rows. Unit vectors become new generators. The row
reduction itself is never carried out; only its basis change is applied to
the next structure and connecting matrices.

Several modules joined by morphisms (a "ladder") are handled in one pass so
that a middle module shared by two morphisms receives a single basis.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from prescomplex.config.logging import get_logger
from prescomplex.core.barcode import INFINITY, Degree, Interval
from prescomplex.core.field import PrimeField
from prescomplex.core.graded import (
    AnnotatedMatrix,
    IntMatrix,
    RawComplex,
    RawModule,
    RawModuleMorphism,
)
from prescomplex.core.reduction import Column, add_scaled
from prescomplex.core.validator import InvariantViolation

logger = get_logger(__name__)


@dataclass(frozen=True)
class LadderPresentation:
    """Generators of every module and the presented morphisms between them."""

    generators: tuple[tuple[Interval, ...], ...]
    morphisms: tuple[AnnotatedMatrix, ...]


class LadderPresenter:
    """Compute canonical presentations of a chain of module morphisms.

    Args:
        modules: Modules ``X^0, ..., X^r`` sharing the stabilization index
        connecting: ``connecting[h][i]`` is the matrix ``X^h_i -> X^{h+1}_i``
        field: Coefficient field
    """

    def __init__(
        self,
        modules: Sequence[RawModule],
        connecting: Sequence[Sequence[IntMatrix]],
        field: PrimeField,
    ) -> None:
        if len(connecting) != len(modules) - 1:
            raise InvariantViolation(
                f"{len(modules)} modules need {len(modules) - 1} connecting families",
                entity=len(connecting),
            )
        self.modules = list(modules)
        self.connecting = list(connecting)
        self.field = field
        self.m = modules[0].m
        self.logger = get_logger(f"{__name__}.LadderPresenter")

        self._births: list[list[int]] = []
        self._deaths: list[list[Degree]] = []
        self._active: list[list[int]] = []
        self._f0: list[list[Column]] = []
        self._current: list[Any] = []
        self._first_new: list[int] = [0] * len(self.modules)

    def run(self) -> LadderPresentation:
        """Process every index and return the presentations.

        Returns:
            LadderPresentation with one annotated matrix per morphism
        """
        self._initialize()
        for i in range(self.m):
            bases = [self._reduce_module(x, i) for x in range(len(self.modules))]
            for h in range(len(self.connecting)):
                self._extend_morphism(h, i, bases[h], bases[h + 1])
            for x, basis in enumerate(bases):
                if i + 1 < self.m:
                    module = self.modules[x]
                    plain = self.field.matmul(module.maps[i + 1], basis.view(np.ndarray))
                    self._current[x] = self.field.array(plain)
            self.logger.debug(
                "presentation_step",
                index=i,
                generators=[len(births) for births in self._births],
            )
        return self._result()

    def _initialize(self) -> None:
        for module in self.modules:
            self._births.append([0] * module.dims[0])
            self._deaths.append([INFINITY] * module.dims[0])
            self._active.append(list(range(module.dims[0])))
            self._current.append(
                self.field.array(module.maps[0]) if self.m > 0 else None
            )
        for family in self.connecting:
            start = family[0]
            self._f0.append(
                [
                    {int(k): int(start[k, j]) for k in np.flatnonzero(start[:, j])}
                    for j in range(start.shape[1])
                ]
            )

    def _reduce_module(self, x: int, i: int) -> Any:
        """Reduce the structure matrix of module ``x`` at index ``i``.

        Returns:
            The basis matrix of ``X^x_{i+1}`` whose first columns are the
            images of the surviving generators
        """
        gf = self.field.gf
        matrix = self._current[x].copy()
        active = self._active[x]
        n_rows = self.modules[x].dims[i + 1]
        pivots: dict[int, int] = {}
        for pos in range(matrix.shape[1]):
            support = np.flatnonzero(matrix[:, pos])
            while support.size:
                pivot = int(support[-1])
                if pivot not in pivots:
                    pivots[pivot] = pos
                    break
                owner = pivots[pivot]
                scalar = -(matrix[pivot, pos] / matrix[pivot, owner])
                matrix[:, pos] = matrix[:, pos] + scalar * matrix[:, owner]
                self._mirror(x, active[pos], active[owner], int(scalar))
                support = np.flatnonzero(matrix[:, pos])

        pivot_positions = sorted(pivots.values())
        kept = set(pivot_positions)
        survivors = [active[pos] for pos in pivot_positions]
        for pos, gen in enumerate(active):
            if pos not in kept:
                self._deaths[x][gen] = i + 1

        free_rows = [row for row in range(n_rows) if row not in pivots]
        basis = gf.Zeros((n_rows, n_rows))
        for column, pos in enumerate(pivot_positions):
            basis[:, column] = matrix[:, pos]
        for offset, row in enumerate(free_rows):
            basis[row, len(pivot_positions) + offset] = 1

        newborn = list(range(len(self._births[x]), len(self._births[x]) + len(free_rows)))
        self._births[x].extend([i + 1] * len(free_rows))
        self._deaths[x].extend([INFINITY] * len(free_rows))
        self._active[x] = survivors + newborn
        self._first_new[x] = len(survivors)
        return basis

    def _mirror(self, x: int, target: int, source: int, scalar: int) -> None:
        """Apply ``gen target += scalar * gen source`` of module ``x`` to f0."""
        field = self.field
        if x < len(self._f0):
            outgoing = self._f0[x]
            add_scaled(outgoing[target], outgoing[source], scalar, field)
        if x > 0:
            correction = field.neg(scalar)
            for column in self._f0[x - 1]:
                value = column.get(target)
                if value is None:
                    continue
                updated = field.add(column.get(source, 0), field.mul(correction, value))
                if updated:
                    column[source] = updated
                else:
                    column.pop(source, None)

    def _extend_morphism(self, h: int, i: int, basis_src: Any, basis_dst: Any) -> None:
        """Append the columns of generators of ``X^h`` born at ``i + 1``."""
        active_src, active_dst = self._active[h], self._active[h + 1]
        first_new = self._first_new[h]
        new_count = len(active_src) - first_new
        if new_count == 0:
            return
        columns = self._f0[h]
        if not active_dst:
            columns.extend({} for _ in range(new_count))
            return
        component = self.field.array(self.connecting[h][i + 1])
        transformed = np.linalg.solve(basis_dst, component @ basis_src[:, first_new:])
        for pos in range(new_count):
            support = np.flatnonzero(transformed[:, pos])
            columns.append(
                {active_dst[int(r)]: int(transformed[int(r), pos]) for r in support}
            )

    def _result(self) -> LadderPresentation:
        generators = tuple(
            tuple(
                Interval(birth, death)
                for birth, death in zip(births, deaths, strict=True)
            )
            for births, deaths in zip(self._births, self._deaths, strict=True)
        )
        morphisms = tuple(
            AnnotatedMatrix.from_columns(
                generators[h + 1], generators[h], self._f0[h], self.field
            )
            for h in range(len(self.connecting))
        )
        self.logger.info(
            "presentation_computed",
            m=self.m,
            generators=[len(g) for g in generators],
        )
        return LadderPresentation(generators, morphisms)


def present_module(module: RawModule) -> tuple[Interval, ...]:
    """Barcode of a single pointwise module, in generator order.

    Raises:
        InvariantViolation: On shape violations, naming the index
    """
    module.validate()
    return LadderPresenter([module], [], module.field).run().generators[0]


def pres_pers_mod(raw: RawModuleMorphism) -> AnnotatedMatrix:
    """Canonical presentation of a pointwise morphism.

    Args:
        raw: Morphism given by structure matrices ``A``, ``B`` and components ``C``

    Returns:
        Annotated matrix ``f0`` whose columns present the domain and whose
        rows present the codomain

    Raises:
        InvariantViolation: On shape or commutativity violations, naming the index
    """
    raw.validate()
    presenter = LadderPresenter([raw.domain(), raw.codomain()], [raw.C], raw.field)
    return presenter.run().morphisms[0]


def pres_complex(raw: RawComplex) -> tuple[AnnotatedMatrix, AnnotatedMatrix]:
    """Canonical presentations of both maps of a pointwise complex.

    The middle module is reduced once, so the rows of ``f0`` and the columns
    of ``g0`` are the same generators.

    Returns:
        Pair ``(f0, g0)`` with ``f0.row_ann == g0.col_ann``

    Raises:
        InvariantViolation: On shape or commutativity violations, or if
            ``g_i f_i`` is not zero, naming the index
    """
    raw.validate()
    presenter = LadderPresenter(
        [raw.first().domain(), raw.first().codomain(), raw.second().codomain()],
        [raw.F, raw.G],
        raw.field,
    )
    f0, g0 = presenter.run().morphisms
    return f0, g0
