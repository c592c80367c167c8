"""Persistent sheaf cohomology over a fixed simplicial complex.

A persistent sheaf assigns to every simplex a persistence module and to
every codimension-one face pair a morphism of persistence modules. Two
routes compute its cohomology:

* "global" expands the cochain complex ``C^{k-1} -> C^k -> C^{k+1}`` into
  pointwise block matrices and presents it with one ladder pass;
* "local" presents every simplex module and every restriction morphism on
  its own and glues the pieces with incidence signs. The pieces are
  independent and are computed in parallel.

Both routes feed the same repair and homology steps and agree bar for bar.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from prescomplex.config.logging import get_logger
from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import Barcode, Interval
from prescomplex.core.complexify import complexify_pair
from prescomplex.core.field import PrimeField
from prescomplex.core.graded import (
    AnnotatedMatrix,
    IntMatrix,
    RawComplex,
    RawModule,
    RawModuleMorphism,
)
from prescomplex.core.homology import pres_hom
from prescomplex.core.presentation import pres_complex, pres_pers_mod, present_module
from prescomplex.core.simplicial import Simplex, SimplicialComplex, incidence
from prescomplex.core.validator import InvariantViolation
from prescomplex.utils.concurrency import parallel_map

logger = get_logger(__name__)

Method = Literal["global", "local"]
RestrictionKey = tuple[Simplex, Simplex, int]
StepKey = tuple[Simplex, int]


def _as_matrices(value: Mapping[object, object]) -> dict[object, np.ndarray]:
    return {key: np.asarray(matrix, dtype=np.int64) for key, matrix in value.items()}


class SheafInstance(BaseModel):
    """A persistent sheaf ``F_0 -> F_1 -> ... -> F_m`` on a simplicial complex.

    Attributes:
        complex: Base simplicial complex
        m: Stabilization index
        stalks: ``stalks[s][i]`` is ``dim F_i(s)``
        restrictions: ``restrictions[(s, t, i)]`` is ``F_i(s) -> F_i(t)``
            for a facet ``s`` of ``t``; missing entries are zero
        steps: ``steps[(s, i)]`` is ``F_i(s) -> F_{i+1}(s)``; missing
            entries are zero
        field_prime: Coefficient field characteristic
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    complex: SimplicialComplex
    m: int = Field(ge=0)
    stalks: dict[Simplex, tuple[int, ...]]
    restrictions: dict[RestrictionKey, np.ndarray] = Field(default_factory=dict)
    steps: dict[StepKey, np.ndarray] = Field(default_factory=dict)
    field_prime: int = 2

    @field_validator("restrictions", "steps", mode="before")
    @classmethod
    def _matrices(cls, value: Mapping[object, object]) -> dict[object, np.ndarray]:
        return _as_matrices(value)

    @model_validator(mode="after")
    def _check(self) -> SheafInstance:
        errors: list[str] = []
        for simplex in self.complex.simplices:
            dims = self.stalks.get(simplex)
            if dims is None or len(dims) != self.m + 1:
                errors.append(f"stalk over {simplex} needs {self.m + 1} dimensions")
        if errors:
            raise InvariantViolation(
                f"sheaf has {len(errors)} stalk errors: {'; '.join(errors)}",
                errors=errors,
            )
        for (face, coface, i), matrix in self.restrictions.items():
            if incidence(face, coface) == 0 or coface not in self.complex:
                raise InvariantViolation(
                    f"{face} <= {coface} is not a codimension-one face pair",
                    entity=(face, coface, i),
                )
            self._check_shape(matrix, (self.dim(coface, i), self.dim(face, i)),
                              f"restriction {face} <= {coface} at {i}", (face, coface, i))
        for (simplex, i), matrix in self.steps.items():
            if simplex not in self.complex or not 0 <= i < self.m:
                raise InvariantViolation(
                    f"step {simplex} at {i} is outside the sheaf", entity=(simplex, i)
                )
            self._check_shape(matrix, (self.dim(simplex, i + 1), self.dim(simplex, i)),
                              f"step {simplex} at {i}", (simplex, i))
        self._check_naturality()
        self._check_functoriality()
        return self

    @staticmethod
    def _check_shape(
        matrix: np.ndarray, expected: tuple[int, int], what: str, entity: object
    ) -> None:
        if matrix.size == 0 and 0 in expected:
            return
        if matrix.shape != expected:
            raise InvariantViolation(
                f"{what} has shape {matrix.shape}, expected {expected}", entity=entity
            )

    def _check_naturality(self) -> None:
        p = self.field_prime
        for face, coface in self.complex.facet_pairs():
            for i in range(self.m):
                left = self.restriction(face, coface, i + 1) @ self.step(face, i)
                right = self.step(coface, i) @ self.restriction(face, coface, i)
                if not np.array_equal(left % p, right % p):
                    raise InvariantViolation(
                        f"steps are not natural for {face} <= {coface} at index {i}",
                        entity=(face, coface, i),
                    )

    def _check_functoriality(self) -> None:
        p = self.field_prime
        for top in self.complex.simplices:
            if len(top) < 3:
                continue
            for a in range(len(top)):
                for b in range(a + 1, len(top)):
                    bottom = top[:a] + top[a + 1 : b] + top[b + 1 :]
                    via_a = top[:a] + top[a + 1 :]
                    via_b = top[:b] + top[b + 1 :]
                    for i in range(self.m + 1):
                        left = self.restriction(via_a, top, i) @ self.restriction(bottom, via_a, i)
                        right = self.restriction(via_b, top, i) @ self.restriction(bottom, via_b, i)
                        if not np.array_equal(left % p, right % p):
                            raise InvariantViolation(
                                f"restrictions from {bottom} to {top} depend on the "
                                f"path at index {i}",
                                entity=(bottom, top, i),
                            )

    @classmethod
    def constant(
        cls, complex: SimplicialComplex, m: int = 0, dim: int = 1, field_prime: int = 2
    ) -> SheafInstance:
        """The constant sheaf ``k^dim`` with identity maps everywhere."""
        eye = np.eye(dim, dtype=np.int64)
        return cls(
            complex=complex,
            m=m,
            stalks={s: (dim,) * (m + 1) for s in complex.simplices},
            restrictions={
                (face, coface, i): eye
                for face, coface in complex.facet_pairs()
                for i in range(m + 1)
            },
            steps={(s, i): eye for s in complex.simplices for i in range(m)},
            field_prime=field_prime,
        )

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.field_prime)

    def dim(self, simplex: Simplex, i: int) -> int:
        return self.stalks[simplex][i]

    def restriction(self, face: Simplex, coface: Simplex, i: int) -> IntMatrix:
        matrix = self.restrictions.get((face, coface, i))
        if matrix is None or matrix.size == 0:
            return np.zeros((self.dim(coface, i), self.dim(face, i)), dtype=np.int64)
        return matrix

    def step(self, simplex: Simplex, i: int) -> IntMatrix:
        matrix = self.steps.get((simplex, i))
        if matrix is None or matrix.size == 0:
            return np.zeros((self.dim(simplex, i + 1), self.dim(simplex, i)), dtype=np.int64)
        return matrix

    def size(self) -> int:
        """Total dimension ``sum_i sum_s dim F_i(s)`` of the pointwise input."""
        return sum(sum(dims) for dims in self.stalks.values())

    def module(self, simplex: Simplex) -> RawModule:
        """The persistence module over one simplex."""
        return RawModule.build(
            self.stalks[simplex],
            [self.step(simplex, i) for i in range(self.m)],
            self.field,
        )

    def morphism(self, face: Simplex, coface: Simplex) -> RawModuleMorphism:
        """The restriction morphism ``F(face) -> F(coface)``."""
        return RawModuleMorphism.build(
            self.stalks[face],
            self.stalks[coface],
            [self.step(face, i) for i in range(self.m)],
            [self.step(coface, i) for i in range(self.m)],
            [self.restriction(face, coface, i) for i in range(self.m + 1)],
            self.field,
        )


def interval_sheaf(
    complex: SimplicialComplex,
    intervals: Mapping[Simplex, Interval],
    m: int,
    field_prime: int = 2,
) -> SheafInstance:
    """Sheaf whose stalk over each simplex is a single interval module.

    A restriction ``[a, b) -> [c, d)`` is the identity wherever both ends are
    alive if ``c <= a`` and ``d <= b``, and zero otherwise.

    Raises:
        InvariantViolation: If an interval ends after ``m`` without being
            infinite, or the resulting maps are not functorial
    """
    for simplex, interval in intervals.items():
        if interval.is_finite and interval.death > m:
            raise InvariantViolation(
                f"interval {interval} over {simplex} ends after m = {m}", entity=simplex
            )
    one = np.ones((1, 1), dtype=np.int64)

    def alive(simplex: Simplex, i: int) -> bool:
        return simplex in intervals and intervals[simplex].contains(i)

    stalks = {
        s: tuple(int(alive(s, i)) for i in range(m + 1)) for s in complex.simplices
    }
    steps = {
        (s, i): one
        for s in complex.simplices
        for i in range(m)
        if alive(s, i) and alive(s, i + 1)
    }
    restrictions = {}
    for face, coface in complex.facet_pairs():
        if face not in intervals or coface not in intervals:
            continue
        source, target = intervals[face], intervals[coface]
        if not (target.birth <= source.birth and target.death <= source.death):
            continue
        for i in range(m + 1):
            if alive(face, i) and alive(coface, i):
                restrictions[(face, coface, i)] = one
    return SheafInstance(
        complex=complex,
        m=m,
        stalks=stalks,
        restrictions=restrictions,
        steps=steps,
        field_prime=field_prime,
    )


def _blocks(S: SheafInstance, k: int, i: int) -> list[tuple[Simplex, int]]:
    """Offsets of the stalk blocks of ``C^k`` at index ``i``."""
    offsets = []
    position = 0
    for simplex in S.complex.skeleton(k) if k >= 0 else []:
        offsets.append((simplex, position))
        position += S.dim(simplex, i)
    return offsets


def _cochain_dims(S: SheafInstance, k: int) -> list[int]:
    simplices = S.complex.skeleton(k) if k >= 0 else []
    return [sum(S.dim(s, i) for s in simplices) for i in range(S.m + 1)]


def _coboundary(S: SheafInstance, k: int, i: int) -> IntMatrix:
    """``delta^k`` at index ``i`` with blocks ``[s : t] F_i(s <= t)``."""
    rows = dict(_blocks(S, k + 1, i))
    cols = _blocks(S, k, i)
    n_rows = sum(S.dim(t, i) for t in rows)
    n_cols = sum(S.dim(s, i) for s, _ in cols)
    matrix = np.zeros((n_rows, n_cols), dtype=np.int64)
    for face, col in cols:
        width = S.dim(face, i)
        for coface in S.complex.cofacets(face):
            row, height = rows[coface], S.dim(coface, i)
            block = incidence(face, coface) * S.restriction(face, coface, i)
            matrix[row : row + height, col : col + width] += block
    return matrix % S.field_prime


def _cochain_step(S: SheafInstance, k: int, i: int) -> IntMatrix:
    """Block-diagonal ``C^k_i -> C^k_{i+1}``."""
    source = _blocks(S, k, i)
    target = dict(_blocks(S, k, i + 1))
    matrix = np.zeros(
        (sum(S.dim(s, i + 1) for s, _ in source), sum(S.dim(s, i) for s, _ in source)),
        dtype=np.int64,
    )
    for simplex, col in source:
        row = target[simplex]
        matrix[row : row + S.dim(simplex, i + 1), col : col + S.dim(simplex, i)] = S.step(
            simplex, i
        )
    return matrix


def build_cochain_raw(S: SheafInstance, k: int, threads: int | None = None) -> RawComplex:
    """Pointwise cochain complex ``C^{k-1} -> C^k -> C^{k+1}`` of a sheaf.

    Args:
        S: Valid persistent sheaf
        k: Middle cochain degree
        threads: Parallel width over the indices

    Returns:
        RawComplex with ``F = delta^{k-1}`` and ``G = delta^k``

    Raises:
        InvariantViolation: If ``delta^k delta^{k-1}`` is not zero at some index
    """
    degrees = (k - 1, k, k + 1)
    dims = tuple(_cochain_dims(S, d) for d in degrees)
    internal = tuple(
        parallel_map(lambda i, d=d: _cochain_step(S, d, i), range(S.m), threads)
        for d in degrees
    )
    F = parallel_map(lambda i: _coboundary(S, k - 1, i), range(S.m + 1), threads)
    G = parallel_map(lambda i: _coboundary(S, k, i), range(S.m + 1), threads)
    raw = RawComplex.build(
        (dims[0], dims[1], dims[2]),
        (internal[0], internal[1], internal[2]),
        F,
        G,
        S.field,
    )
    return raw.validate()


@dataclass(frozen=True)
class LocalPresentations:
    """Presentations of every simplex module and every restriction morphism.

    ``modules[s]`` lists the generators of the module over ``s``;
    ``morphisms[(s, t)]`` presents the restriction with columns indexed by
    the generators of ``s`` and rows by those of ``t``.
    """

    complex: SimplicialComplex
    modules: dict[Simplex, tuple[Interval, ...]]
    morphisms: dict[tuple[Simplex, Simplex], AnnotatedMatrix]
    field: PrimeField

    def compressed_size(self) -> int:
        """Total number of local generators."""
        return sum(len(generators) for generators in self.modules.values())


def local_presentations(S: SheafInstance, threads: int | None = None) -> LocalPresentations:
    """Present every simplex module and restriction morphism independently.

    A module's generators depend only on its own structure maps, so the
    presentations of one simplex agree across every morphism it touches.
    """
    simplices = list(S.complex.simplices)
    pairs = list(S.complex.facet_pairs())
    modules = parallel_map(lambda s: present_module(S.module(s)), simplices, threads)
    morphisms = parallel_map(lambda pair: pres_pers_mod(S.morphism(*pair)), pairs, threads)
    local = LocalPresentations(
        complex=S.complex,
        modules=dict(zip(simplices, modules, strict=True)),
        morphisms=dict(zip(pairs, morphisms, strict=True)),
        field=S.field,
    )
    logger.info(
        "local_presentations_computed",
        simplices=len(simplices),
        pairs=len(pairs),
        generators=local.compressed_size(),
        input_size=S.size(),
    )
    return local


def _global_coboundary(local: LocalPresentations, k: int) -> AnnotatedMatrix:
    """Glue the local morphisms into ``delta^k`` on the presented generators."""
    field = local.field

    def layout(degree: int) -> tuple[list[Interval], dict[Simplex, int]]:
        annotations: list[Interval] = []
        offsets: dict[Simplex, int] = {}
        for simplex in local.complex.skeleton(degree) if degree >= 0 else []:
            offsets[simplex] = len(annotations)
            annotations.extend(local.modules[simplex])
        return annotations, offsets

    col_ann, col_offsets = layout(k)
    row_ann, row_offsets = layout(k + 1)
    columns: list[dict[int, int]] = [{} for _ in col_ann]
    for face, start in col_offsets.items():
        for coface in local.complex.cofacets(face):
            sign = incidence(face, coface)
            block = local.morphisms[(face, coface)]
            shift = row_offsets[coface]
            for row, col, value in block.nonzero():
                columns[start + col][shift + row] = field.mul(sign % field.p, value)
    return AnnotatedMatrix.from_columns(row_ann, col_ann, columns, field)


def assemble_local_presentations(
    local: LocalPresentations, k: int
) -> tuple[AnnotatedMatrix, AnnotatedMatrix]:
    """Global complex of presentations ``(f0, g0)`` around ``C^k``.

    Generators are ordered by simplex, then by local generator index.
    """
    return _global_coboundary(local, k - 1), _global_coboundary(local, k)


def persistent_sheaf_cohomology(
    S: SheafInstance,
    k: int,
    method: Method | None = None,
    threads: int | None = None,
    keep_empty: bool | None = None,
) -> Barcode:
    """Barcode of ``H^k`` of a persistent sheaf.

    Args:
        S: Valid persistent sheaf
        k: Cohomology degree
        method: "global" or "local"; defaults to the configured method
        threads: Parallel width; defaults to the configured value
        keep_empty: Keep zero-length bars; defaults to the configured value

    Returns:
        Barcode with every bar labelled ``k``
    """
    if method is None:
        method = get_settings().sheaf_method
    if k < 0 or k > S.complex.dimension:
        return Barcode()
    if method == "global":
        f0, g0 = pres_complex(build_cochain_raw(S, k, threads))
    elif method == "local":
        f0, g0 = assemble_local_presentations(local_presentations(S, threads), k)
    else:
        raise ValueError(f"unknown method {method!r}; expected 'global' or 'local'")
    f0, g0 = complexify_pair(f0, g0)
    barcode = pres_hom(f0, g0, degree_label=k, keep_empty=keep_empty)
    logger.info(
        "sheaf_cohomology_computed", degree=k, method=method, size=S.size(), bars=len(barcode)
    )
    return barcode
