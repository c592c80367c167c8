"""Persistent homology of simplicial towers.

A tower is a stream of elementary inclusions and elementary vertex
collapses. :class:`TowerPresenter` keeps one annotated boundary matrix per
dimension and updates it per event with single sparse column and row
additions, never materializing the chain maps of the collapses:

* an inclusion at time ``t`` appends the boundary column of the new simplex
  (annotated ``[t, inf)``) and an empty row one dimension up;
* a collapse ``b -> a`` at time ``t`` walks the live simplices containing
  ``b`` by increasing dimension. A simplex that degenerates dies at ``t``.
  A simplex whose image is already alive is merged into it: the later-born
  generator is rewritten as its difference with the earlier-born one and
  dies at ``t``. Otherwise the simplex is relabelled.

Each simplex owns a block of generators whose size is given by a stalk
model; the plain tower uses one generator per simplex, a cosheaf uses the
stalk of the simplex's final image, so pulled-back stalks are never built.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Annotated, Literal, Protocol

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    field_validator,
    model_validator,
)

from prescomplex.config.logging import get_logger
from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import INFINITY, Barcode, Degree, Interval
from prescomplex.core.complexify import complexify_pair
from prescomplex.core.field import PrimeField
from prescomplex.core.graded import AnnotatedMatrix, IntMatrix, RawComplex
from prescomplex.core.homology import pres_hom
from prescomplex.core.reduction import Column, add_scaled
from prescomplex.core.simplicial import Simplex, boundary_faces, relabel_sign
from prescomplex.core.validator import InvariantViolation, TowerScriptError
from prescomplex.utils.monitoring import OperationCounter

logger = get_logger(__name__)


class IncludeEvent(BaseModel):
    """Elementary inclusion of one simplex."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["include"] = "include"
    time: int = Field(ge=0)
    simplex: tuple[int, ...]

    @field_validator("simplex")
    @classmethod
    def _canonical(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise ValueError("a simplex needs at least one vertex")
        if len(set(value)) != len(value):
            raise ValueError(f"simplex {value} repeats a vertex")
        return tuple(sorted(value))

    @property
    def dimension(self) -> int:
        return len(self.simplex) - 1


class CollapseEvent(BaseModel):
    """Elementary collapse mapping vertex ``source`` onto vertex ``target``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["collapse"] = "collapse"
    time: int = Field(ge=0)
    source: int
    target: int

    @model_validator(mode="after")
    def _distinct(self) -> CollapseEvent:
        if self.source == self.target:
            raise ValueError(f"collapse of vertex {self.source} onto itself")
        return self


TowerEvent = Annotated[IncludeEvent | CollapseEvent, Field(discriminator="kind")]


class TowerScript(BaseModel):
    """Time-ordered elementary operations; event ``t`` happens at index ``t``."""

    model_config = ConfigDict(frozen=True)

    events: tuple[TowerEvent, ...] = ()
    field_prime: int = 2

    @model_validator(mode="after")
    def _consecutive_times(self) -> TowerScript:
        for expected, event in enumerate(self.events):
            if event.time != expected:
                raise TowerScriptError(
                    f"event times must be 0, 1, 2, ...; expected {expected}, got {event.time}",
                    entity=event.time,
                )
        return self

    @classmethod
    def from_operations(
        cls, operations: Iterable[Sequence[int] | tuple[str, int, int]], field_prime: int = 2
    ) -> TowerScript:
        """Build from a compact list: vertex tuples include, ``("c", b, a)`` collapses."""
        events: list[IncludeEvent | CollapseEvent] = []
        for time, operation in enumerate(operations):
            if operation and operation[0] == "c":
                _, source, target = operation
                events.append(
                    CollapseEvent(time=time, source=int(source), target=int(target))
                )
            else:
                events.append(
                    IncludeEvent(time=time, simplex=tuple(int(v) for v in operation))
                )
        return cls(events=tuple(events), field_prime=field_prime)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.field_prime)

    @property
    def max_dimension(self) -> int:
        return max(
            (e.dimension for e in self.events if isinstance(e, IncludeEvent)), default=-1
        )

    def __len__(self) -> int:
        return len(self.events)


class StalkModel(Protocol):
    """Block sizes and extension maps over the final complex of a tower."""

    def dimension(self, simplex: Simplex) -> int: ...

    def restriction(self, face: Simplex, coface: Simplex) -> IntMatrix: ...


@dataclass(frozen=True)
class ConstantCosheaf:
    """The constant cosheaf ``k^d``; ``d = 1`` is ordinary homology."""

    dim: int = 1

    def dimension(self, simplex: Simplex) -> int:
        return self.dim

    def restriction(self, face: Simplex, coface: Simplex) -> IntMatrix:
        return np.eye(self.dim, dtype=np.int64)


class CosheafData(BaseModel):
    """A cosheaf on the final complex of a tower.

    ``extensions[(face, coface)]`` is the map ``F(coface) -> F(face)`` for a
    codimension-one pair, of shape ``stalks[face] x stalks[coface]``;
    missing pairs are zero maps. Longer face relations compose along
    codimension-one steps.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    stalks: dict[Simplex, int]
    extensions: dict[tuple[Simplex, Simplex], np.ndarray] = Field(default_factory=dict)
    field_prime: int = 2

    _cache: dict[tuple[Simplex, Simplex], IntMatrix] = PrivateAttr(default_factory=dict)

    @field_validator("extensions", mode="before")
    @classmethod
    def _as_arrays(cls, value: dict[tuple[Simplex, Simplex], object]) -> dict[
        tuple[Simplex, Simplex], np.ndarray
    ]:
        return {
            (tuple(face), tuple(coface)): np.atleast_2d(np.asarray(matrix, dtype=np.int64))
            for (face, coface), matrix in value.items()
        }

    @model_validator(mode="after")
    def _check(self) -> CosheafData:
        for simplex, dim in self.stalks.items():
            if dim < 0:
                raise InvariantViolation(
                    f"negative stalk dimension over {simplex}", entity=simplex
                )
            for _, face in boundary_faces(simplex) if len(simplex) > 1 else ():
                if face not in self.stalks:
                    raise InvariantViolation(
                        f"stalk over face {face} of {simplex} is missing", entity=simplex
                    )
        for (face, coface), matrix in self.extensions.items():
            if len(coface) != len(face) + 1 or not set(face) <= set(coface):
                raise InvariantViolation(
                    f"{face} is not a facet of {coface}", entity=(face, coface)
                )
            expected = (self.dimension(face), self.dimension(coface))
            if matrix.size == 0:
                self.extensions[(face, coface)] = np.zeros(expected, dtype=np.int64)
            elif matrix.shape != expected:
                raise InvariantViolation(
                    f"extension {face} <= {coface} has shape {matrix.shape}, "
                    f"expected {expected}",
                    entity=(face, coface),
                )
        self._check_functoriality()
        return self

    def _check_functoriality(self) -> None:
        p = self.field_prime
        for top in self.stalks:
            if len(top) < 3:
                continue
            for i in range(len(top)):
                for j in range(i + 1, len(top)):
                    bottom = top[:i] + top[i + 1 : j] + top[j + 1 :]
                    via_i = top[:i] + top[i + 1 :]
                    via_j = top[:j] + top[j + 1 :]
                    left = self._step(bottom, via_i) @ self._step(via_i, top)
                    right = self._step(bottom, via_j) @ self._step(via_j, top)
                    if not np.array_equal(left % p, right % p):
                        raise InvariantViolation(
                            f"extensions from {top} to {bottom} depend on the path",
                            entity=(bottom, top),
                        )

    def _step(self, face: Simplex, coface: Simplex) -> IntMatrix:
        matrix = self.extensions.get((face, coface))
        if matrix is None:
            return np.zeros((self.dimension(face), self.dimension(coface)), dtype=np.int64)
        return matrix

    def dimension(self, simplex: Simplex) -> int:
        if simplex not in self.stalks:
            raise InvariantViolation(f"no stalk over {simplex}", entity=simplex)
        return self.stalks[simplex]

    def restriction(self, face: Simplex, coface: Simplex) -> IntMatrix:
        """The map ``F(coface) -> F(face)`` for any face relation."""
        if face == coface:
            return np.eye(self.dimension(face), dtype=np.int64)
        key = (face, coface)
        if key not in self._cache:
            missing = [v for v in coface if v not in face]
            if len(missing) != len(coface) - len(face):
                raise InvariantViolation(
                    f"{face} is not a face of {coface}", entity=key
                )
            middle = tuple(v for v in coface if v != missing[0])
            product = self.restriction(face, middle) @ self._step(middle, coface)
            self._cache[key] = product % self.field_prime
        return self._cache[key]


def final_vertex_maps(script: TowerScript) -> list[dict[int, int]]:
    """For every index ``t`` the vertex map from ``K_t`` to the final complex.

    Maps list only the vertices that move; look up with ``.get(v, v)``.
    """
    maps: list[dict[int, int]] = [{} for _ in script.events]
    current: dict[int, int] = {}
    for t in range(len(script.events) - 1, 0, -1):
        event = script.events[t]
        if isinstance(event, CollapseEvent):
            current = dict(current)
            current[event.source] = current.get(event.target, event.target)
        maps[t - 1] = current
    return maps


def final_images(script: TowerScript) -> list[Simplex | None]:
    """Image in the final complex of every included simplex (None for collapses)."""
    maps = final_vertex_maps(script)
    images: list[Simplex | None] = []
    for event, vertex_map in zip(script.events, maps, strict=True):
        if isinstance(event, IncludeEvent):
            images.append(_image(event.simplex, vertex_map))
        else:
            images.append(None)
    return images


def _image(simplex: Simplex, vertex_map: dict[int, int]) -> Simplex:
    return tuple(sorted({vertex_map.get(v, v) for v in simplex}))


@dataclass
class _Cell:
    """Handle of a live simplex: its generators and their orientation."""

    dim: int
    slots: list[int]
    sign: int
    birth: int
    image: Simplex


class TowerPresenter:
    """Streaming state machine maintaining boundary presentations.

    Args:
        max_dim: Largest simplex dimension accepted
        field: Coefficient field
        stalks: Block sizes and extension maps; one generator per simplex
            if omitted
        counter: Optional operation counter
        validate_events: Re-validate all matrices after every event
    """

    def __init__(
        self,
        max_dim: int,
        field: PrimeField,
        stalks: StalkModel | None = None,
        counter: OperationCounter | None = None,
        validate_events: bool = False,
    ) -> None:
        self.max_dim = max_dim
        self.field = field
        self.stalks: StalkModel = stalks or ConstantCosheaf()
        self.counter = counter
        self.validate_events = validate_events
        self.logger = get_logger(f"{__name__}.TowerPresenter")

        self._births: list[list[int]] = [[] for _ in range(max_dim + 1)]
        self._deaths: list[list[Degree]] = [[] for _ in range(max_dim + 1)]
        self._columns: list[list[Column]] = [[] for _ in range(max_dim + 1)]
        self._live: dict[Simplex, _Cell] = {}
        self._star: dict[int, set[Simplex]] = {}

    def include(self, time: int, simplex: Simplex, image: Simplex) -> None:
        """Add ``simplex`` at ``time``; ``image`` is its final image.

        Raises:
            TowerScriptError: If the simplex is alive, too large, or has a
                missing face
        """
        k = len(simplex) - 1
        if k > self.max_dim:
            raise TowerScriptError(
                f"t={time}: simplex {simplex} exceeds dimension {self.max_dim}",
                entity=time,
            )
        if simplex in self._live:
            raise TowerScriptError(
                f"t={time}: simplex {simplex} is already alive", entity=time
            )
        faces = list(boundary_faces(simplex)) if k > 0 else []
        for _, face in faces:
            if face not in self._live:
                raise TowerScriptError(
                    f"t={time}: face {face} of {simplex} is not alive", entity=time
                )

        size = self.stalks.dimension(image)
        first = len(self._births[k])
        blocks = [
            (sign * self._live[face].sign, self._live[face], self._extension(
                self._live[face].image, image, len(self._live[face].slots), size
            ))
            for sign, face in faces
        ]
        for r in range(size):
            column: Column = {}
            for sign, face_cell, block in blocks:
                for s, slot in enumerate(face_cell.slots):
                    value = (sign * int(block[s, r])) % self.field.p
                    if value:
                        column[slot] = value
            self._columns[k].append(column)
            self._births[k].append(time)
            self._deaths[k].append(INFINITY)

        cell = _Cell(k, list(range(first, first + size)), 1, time, image)
        self._live[simplex] = cell
        for v in simplex:
            self._star.setdefault(v, set()).add(simplex)
        self._after_event(time, "include")

    def collapse(self, time: int, source: int, target: int) -> None:
        """Identify vertex ``source`` with vertex ``target`` at ``time``.

        Raises:
            TowerScriptError: If either vertex is not alive
        """
        for vertex in (source, target):
            if (vertex,) not in self._live:
                raise TowerScriptError(
                    f"t={time}: vertex {vertex} is not alive", entity=time
                )
        affected = sorted(self._star.pop(source, set()), key=lambda s: (len(s), s))
        for simplex in affected:
            cell = self._live.pop(simplex)
            for v in simplex:
                if v != source:
                    self._star[v].discard(simplex)
            if target in simplex:
                for slot in cell.slots:
                    self._deaths[cell.dim][slot] = time
                continue
            image, sign = relabel_sign(simplex, source, target)
            if image in self._live:
                self._merge(time, cell, sign, image)
            else:
                cell.sign *= sign
                self._live[image] = cell
                for v in image:
                    self._star.setdefault(v, set()).add(image)
        self._after_event(time, "collapse")

    def _merge(self, time: int, cell: _Cell, sign: int, image: Simplex) -> None:
        other = self._live[image]
        if len(cell.slots) != len(other.slots):
            raise InvariantViolation(
                f"t={time}: merging blocks of sizes {len(cell.slots)} and "
                f"{len(other.slots)} onto {image}",
                entity=image,
            )
        cell.sign *= sign
        factor = cell.sign * other.sign
        earlier, later = (other, cell) if other.birth <= cell.birth else (cell, other)
        k = cell.dim
        columns = self._columns[k]
        cofaces = self._columns[k + 1] if k + 1 <= self.max_dim else []
        for keep, drop in zip(earlier.slots, later.slots, strict=True):
            add_scaled(columns[drop], columns[keep], self.field.neg(factor),
                       self.field, self.counter)
            touched = 0
            for column in cofaces:
                value = column.get(drop)
                if value is None:
                    continue
                touched += 1
                updated = (column.get(keep, 0) + factor * value) % self.field.p
                if updated:
                    column[keep] = updated
                else:
                    column.pop(keep, None)
            if self.counter is not None:
                self.counter.row_addition(touched)
            self._deaths[k][drop] = time
        if self.counter is not None:
            self.counter.bump("merges")
        self._live[image] = earlier

    def _extension(
        self, face_image: Simplex, image: Simplex, rows: int, cols: int
    ) -> IntMatrix:
        if face_image == image:
            return np.eye(cols, dtype=np.int64)
        block = np.asarray(self.stalks.restriction(face_image, image), dtype=np.int64)
        if block.shape != (rows, cols):
            raise InvariantViolation(
                f"extension {face_image} <= {image} has shape {block.shape}, "
                f"expected {(rows, cols)}",
                entity=(face_image, image),
            )
        return block

    def _after_event(self, time: int, kind: str) -> None:
        self.logger.debug("tower_event_applied", time=time, kind=kind, live=len(self._live))
        if self.validate_events:
            for matrix in self.presentations():
                matrix.validate()

    def boundary(self, k: int) -> AnnotatedMatrix:
        """Current annotated boundary matrix from dimension ``k`` to ``k - 1``."""
        rows = self._intervals(k - 1)
        cols = self._intervals(k)
        columns = self._columns[k] if 0 <= k <= self.max_dim else []
        return AnnotatedMatrix.from_columns(rows, cols, columns, self.field)

    def presentations(self) -> list[AnnotatedMatrix]:
        """Boundary matrices for dimensions ``0 .. max_dim + 1``."""
        return [self.boundary(k) for k in range(self.max_dim + 2)]

    def _intervals(self, k: int) -> list[Interval]:
        if not 0 <= k <= self.max_dim:
            return []
        return [
            Interval(birth, death)
            for birth, death in zip(self._births[k], self._deaths[k], strict=True)
        ]


def run_tower(
    script: TowerScript,
    max_dim: int | None = None,
    stalks: StalkModel | None = None,
    counter: OperationCounter | None = None,
    validate_events: bool | None = None,
) -> TowerPresenter:
    """Feed every event of ``script`` through a fresh presenter."""
    if max_dim is None:
        max_dim = max(script.max_dimension, 0)
    if validate_events is None:
        validate_events = get_settings().validate_events
    presenter = TowerPresenter(max_dim, script.field, stalks, counter, validate_events)
    vertex_maps = final_vertex_maps(script)
    for event, vertex_map in zip(script.events, vertex_maps, strict=True):
        if isinstance(event, IncludeEvent):
            presenter.include(event.time, event.simplex, _image(event.simplex, vertex_map))
        else:
            presenter.collapse(event.time, event.source, event.target)
    return presenter


def tower_presentations(
    script: TowerScript,
    max_dim: int | None = None,
    counter: OperationCounter | None = None,
) -> list[AnnotatedMatrix]:
    """Annotated boundary matrices ``[d_0, ..., d_{max_dim + 1}]`` of a tower.

    Args:
        script: Valid tower script
        max_dim: Largest maintained dimension; defaults to the largest
            simplex of the script
        counter: Optional operation counter

    Returns:
        One annotated matrix per dimension ``k``, rows of dimension ``k - 1``

    Raises:
        TowerScriptError: On a malformed event, naming its time
    """
    presenter = run_tower(script, max_dim, counter=counter)
    if counter is not None:
        counter.log_summary("tower_presented", events=len(script))
    return presenter.presentations()


def homology_from_boundaries(
    boundaries: Sequence[AnnotatedMatrix],
    degrees: Iterable[int],
    keep_empty: bool | None = None,
) -> Barcode:
    """Barcode of ``H_k`` for each requested ``k`` from boundary presentations."""
    barcodes = []
    for k in sorted(set(degrees)):
        if k < 0 or k + 1 >= len(boundaries):
            continue
        f0, g0 = complexify_pair(boundaries[k + 1], boundaries[k])
        barcodes.append(pres_hom(f0, g0, degree_label=k, keep_empty=keep_empty))
    return Barcode.merge(*barcodes)


def tower_homology(
    script: TowerScript,
    degrees: Iterable[int] | None = None,
    keep_empty: bool | None = None,
) -> Barcode:
    """Persistent homology of a simplicial tower.

    Args:
        script: Valid tower script
        degrees: Homology degrees; all dimensions of the script if omitted
        keep_empty: Keep zero-length bars; defaults to the configured value

    Returns:
        Barcode with bars of every requested degree
    """
    if not script.events:
        return Barcode()
    boundaries = tower_presentations(script)
    if degrees is None:
        degrees = range(script.max_dimension + 1)
    return homology_from_boundaries(boundaries, degrees, keep_empty)


def _check_field(script: TowerScript, cosheaf: CosheafData) -> None:
    if script.field_prime != cosheaf.field_prime:
        raise InvariantViolation(
            f"tower over GF({script.field_prime}) but cosheaf over "
            f"GF({cosheaf.field_prime})",
            entity=cosheaf.field_prime,
        )


def cosheaf_tower_presentations(
    script: TowerScript,
    cosheaf: CosheafData,
    max_dim: int | None = None,
    counter: OperationCounter | None = None,
) -> list[AnnotatedMatrix]:
    """Block boundary presentations of a cosheaf pulled back along a tower.

    Each simplex contributes as many generators as the stalk over its final
    image; boundary blocks are ``[face : simplex]`` times the cosheaf map
    between the final images.

    Raises:
        TowerScriptError: On a malformed event
        InvariantViolation: On a missing stalk or a mis-shaped extension,
            naming the face pair
    """
    _check_field(script, cosheaf)
    presenter = run_tower(script, max_dim, stalks=cosheaf, counter=counter)
    if counter is not None:
        counter.log_summary("cosheaf_tower_presented", events=len(script))
    return presenter.presentations()


def cosheaf_tower_homology(
    script: TowerScript,
    cosheaf: CosheafData,
    degrees: Iterable[int] | None = None,
    keep_empty: bool | None = None,
) -> Barcode:
    """Persistent cosheaf homology along a tower."""
    if not script.events:
        return Barcode()
    boundaries = cosheaf_tower_presentations(script, cosheaf)
    if degrees is None:
        degrees = range(script.max_dimension + 1)
    return homology_from_boundaries(boundaries, degrees, keep_empty)


def pointwise_chain_complex(
    script: TowerScript, degree: int, stalks: StalkModel | None = None
) -> RawComplex:
    """Expand a tower into chain modules ``C_{k+1} -> C_k -> C_{k-1}`` per index.

    Inclusions embed the chain modules; a collapse sends each simplex to its
    signed image or to zero when it degenerates. Blocks follow the stalk
    model exactly as in :class:`TowerPresenter`.

    Raises:
        TowerScriptError: If the script is empty
    """
    if not script.events:
        raise TowerScriptError("cannot expand an empty tower", entity=0)
    stalks = stalks or ConstantCosheaf()
    field = script.field
    vertex_maps = final_vertex_maps(script)

    snapshots: list[set[Simplex]] = []
    live: set[Simplex] = set()
    for event in script.events:
        if isinstance(event, IncludeEvent):
            live = live | {event.simplex}
        else:
            moved = set()
            for simplex in live:
                if event.source in simplex and event.target not in simplex:
                    moved.add(relabel_sign(simplex, event.source, event.target)[0])
                elif event.source not in simplex:
                    moved.add(simplex)
            live = moved
        snapshots.append(live)

    def basis(i: int, k: int) -> list[tuple[Simplex, int]]:
        cells = sorted(s for s in snapshots[i] if len(s) == k + 1)
        return [
            (s, r)
            for s in cells
            for r in range(stalks.dimension(_image(s, vertex_maps[i])))
        ]

    def boundary_matrix(i: int, k: int) -> IntMatrix:
        rows, cols = basis(i, k - 1), basis(i, k)
        index = {cell: n for n, cell in enumerate(rows)}
        matrix = np.zeros((len(rows), len(cols)), dtype=np.int64)
        if k <= 0:
            return matrix
        for j, (simplex, r) in enumerate(cols):
            image = _image(simplex, vertex_maps[i])
            for sign, face in boundary_faces(simplex):
                face_image = _image(face, vertex_maps[i])
                if face_image == image:
                    block = np.eye(stalks.dimension(image), dtype=np.int64)
                else:
                    block = np.asarray(stalks.restriction(face_image, image), dtype=np.int64)
                for s in range(block.shape[0]):
                    if block[s, r]:
                        row = index[(face, s)]
                        matrix[row, j] = (matrix[row, j] + sign * block[s, r]) % field.p
        return matrix

    def chain_map(i: int, k: int) -> IntMatrix:
        src, dst = basis(i, k), basis(i + 1, k)
        index = {cell: n for n, cell in enumerate(dst)}
        matrix = np.zeros((len(dst), len(src)), dtype=np.int64)
        event = script.events[i + 1]
        for j, (simplex, r) in enumerate(src):
            if isinstance(event, IncludeEvent) or event.source not in simplex:
                matrix[index[(simplex, r)], j] = 1
            elif event.target not in simplex:
                image, sign = relabel_sign(simplex, event.source, event.target)
                matrix[index[(image, r)], j] = sign % field.p
        return matrix

    m = len(script.events) - 1
    dims = tuple(
        [len(basis(i, k)) for i in range(m + 1)] for k in (degree + 1, degree, degree - 1)
    )
    internal = tuple(
        [chain_map(i, k) for i in range(m)] for k in (degree + 1, degree, degree - 1)
    )
    F = [boundary_matrix(i, degree + 1) for i in range(m + 1)]
    G = [boundary_matrix(i, degree) for i in range(m + 1)]
    return RawComplex.build(
        (dims[0], dims[1], dims[2]),
        (internal[0], internal[1], internal[2]),
        F,
        G,
        field,
    )
