"""Line-oriented text formats for every input document and the barcode output.

All formats share the same lexical rules: UTF-8, one record per line,
whitespace-separated tokens, blank lines and lines starting with ``#``
ignored. A matrix block is ``rows`` lines of ``cols`` residues each; a
matrix with no entries occupies no lines. Simplices are written as vertex
ids joined by commas (``0,1,2``).

Parse failures raise :class:`ParseError` carrying the path and the line
number; documents that parse but break an algebraic invariant raise the
corresponding :class:`InvariantViolation` from the model they build.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Generic, TypeVar

import numpy as np
from pydantic import ValidationError

from prescomplex.config.logging import get_logger
from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import INFINITY, Barcode, Interval, format_index, parse_index
from prescomplex.core.field import PrimeField
from prescomplex.core.graded import (
    AnnotatedMatrix,
    IntMatrix,
    RawComplex,
    RawModuleMorphism,
)
from prescomplex.core.simplicial import Simplex, SimplicialComplex, canonical
from prescomplex.core.validator import InvariantViolation, ParseError
from prescomplex.pipelines.poset import FinitePoset, PosetSheafInstance
from prescomplex.pipelines.sheaf import SheafInstance
from prescomplex.pipelines.tower import (
    CollapseEvent,
    CosheafData,
    IncludeEvent,
    TowerScript,
)

logger = get_logger(__name__)

T = TypeVar("T")
C = TypeVar("C", bound=Hashable)


@dataclass(frozen=True)
class _Line:
    number: int
    tokens: list[str]

    @property
    def keyword(self) -> str:
        return self.tokens[0]


class _Reader:
    """Cursor over the significant lines of a document."""

    def __init__(self, text: str, path: str | None = None) -> None:
        self.path = path
        self.lines = [
            _Line(number, raw.split())
            for number, raw in enumerate(text.splitlines(), start=1)
            if raw.strip() and not raw.lstrip().startswith("#")
        ]
        self.position = 0

    def error(self, message: str, line: _Line | None = None) -> ParseError:
        return ParseError(message, path=self.path, line=line.number if line else None)

    def at_end(self) -> bool:
        return self.position >= len(self.lines)

    def peek(self) -> _Line | None:
        return None if self.at_end() else self.lines[self.position]

    def next(self, expected: str) -> _Line:
        if self.at_end():
            last = self.lines[-1] if self.lines else None
            raise self.error(f"unexpected end of document, expected {expected}", last)
        line = self.lines[self.position]
        self.position += 1
        return line

    def integer(self, token: str, line: _Line, what: str) -> int:
        try:
            return int(token)
        except ValueError:
            raise self.error(f"{what} must be an integer, got {token!r}", line) from None

    def natural(self, token: str, line: _Line, what: str) -> int:
        value = self.integer(token, line, what)
        if value < 0:
            raise self.error(f"{what} must be non-negative, got {value}", line)
        return value

    def interval(self, line: _Line, what: str) -> Interval:
        if len(line.tokens) != 3:
            raise self.error(f"{what} needs '<birth> <death|inf>'", line)
        try:
            birth = parse_index(line.tokens[1])
            if birth == INFINITY:
                raise ValueError("birth cannot be inf")
            return Interval(int(birth), parse_index(line.tokens[2]))
        except ValueError as exc:
            raise self.error(f"bad {what}: {exc}", line) from None

    def simplex(self, token: str, line: _Line) -> Simplex:
        try:
            return canonical(self.natural(v, line, "vertex id") for v in token.split(","))
        except InvariantViolation as exc:
            raise self.error(str(exc), line) from None

    def arity(self, line: _Line, count: int, usage: str) -> None:
        if len(line.tokens) != count:
            raise self.error(f"expected '{usage}'", line)

    def matrix(self, rows: int, cols: int, what: str) -> IntMatrix:
        if rows == 0 or cols == 0:
            return np.zeros((rows, cols), dtype=np.int64)
        data = []
        for r in range(rows):
            line = self.next(f"row {r} of {what}")
            if len(line.tokens) != cols:
                raise self.error(
                    f"row {r} of {what} has {len(line.tokens)} entries, expected {cols}",
                    line,
                )
            data.append([self.integer(token, line, f"entry of {what}") for token in line.tokens])
        return np.asarray(data, dtype=np.int64)

    def header(
        self, keyword: str, arity: int, field_prime: int | None, prime_required: bool
    ) -> tuple[_Line, PrimeField]:
        """Read the header line and resolve the field.

        A prime in the header must agree with ``field_prime`` when both are
        given; otherwise whichever is present wins, then the configured
        default.
        """
        line = self.next(f"'{keyword}' header")
        if line.keyword != keyword:
            raise self.error(f"expected '{keyword}' header, got {line.keyword!r}", line)
        allowed = {arity + 1} if prime_required else {arity, arity + 1}
        if len(line.tokens) not in allowed:
            raise self.error(f"malformed '{keyword}' header", line)
        header_prime = None
        if len(line.tokens) == arity + 1:
            header_prime = self.natural(line.tokens[arity], line, "field prime")
        if header_prime is not None and field_prime is not None and header_prime != field_prime:
            raise self.error(
                f"document is over GF({header_prime}) but GF({field_prime}) was requested",
                line,
            )
        p = header_prime if header_prime is not None else field_prime
        try:
            return line, PrimeField(p if p is not None else get_settings().field_prime)
        except ValueError as exc:
            raise self.error(str(exc), line) from None

    def build(self, factory: Callable[[], T], line: _Line | None) -> T:
        """Run a model constructor, turning pydantic field errors into parse errors."""
        try:
            return factory()
        except ValidationError as exc:
            messages = [str(error["msg"]) for error in exc.errors()]
            raise self.error("; ".join(messages), line) from None


# ANNMAT


def parse_annmat(
    text: str, path: str | None = None, field_prime: int | None = None
) -> AnnotatedMatrix:
    """Parse an ``annmat <rows> <cols> <p>`` document."""
    reader = _Reader(text, path)
    head, field = reader.header("annmat", 3, field_prime, prime_required=True)
    n_rows = reader.natural(head.tokens[1], head, "row count")
    n_cols = reader.natural(head.tokens[2], head, "column count")
    annotations: dict[str, list[Interval]] = {"r": [], "c": []}
    for kind, count in (("r", n_rows), ("c", n_cols)):
        for n in range(count):
            line = reader.next(f"annotation '{kind}' {n}")
            if line.keyword != kind:
                raise reader.error(f"expected '{kind}' annotation, got {line.keyword!r}", line)
            annotations[kind].append(reader.interval(line, "annotation"))
    entries = reader.matrix(n_rows, n_cols, "the matrix")
    if (extra := reader.peek()) is not None:
        raise reader.error("trailing content after the matrix", extra)
    return AnnotatedMatrix.from_dense(entries, annotations["r"], annotations["c"], field)


def write_annmat(matrix: AnnotatedMatrix) -> str:
    lines = [f"annmat {matrix.n_rows} {matrix.n_cols} {matrix.field.p}"]
    lines += [f"r {a.birth} {format_index(a.death)}" for a in matrix.row_ann]
    lines += [f"c {a.birth} {format_index(a.death)}" for a in matrix.col_ann]
    if matrix.n_cols:
        lines += [" ".join(str(int(v)) for v in row) for row in matrix.to_dense()]
    return "\n".join(lines) + "\n"


# RAWMOD / RAWCPLX

Shape = Callable[[int], tuple[int, int]]


def _dims(reader: _Reader, keyword: str, count: int) -> list[int]:
    line = reader.next(f"'{keyword}' line")
    if line.keyword != keyword:
        raise reader.error(f"expected '{keyword}', got {line.keyword!r}", line)
    if len(line.tokens) != count + 1:
        raise reader.error(f"'{keyword}' needs {count} dimensions", line)
    return [reader.natural(token, line, "dimension") for token in line.tokens[1:]]


def _blocks(
    reader: _Reader, m: int, internal: dict[str, Shape], connecting: dict[str, Shape]
) -> dict[str, list[IntMatrix]]:
    """Read labelled ``<name> <i>`` blocks; missing blocks are zero.

    Internal blocks are structure maps (``i < m``), connecting blocks are
    pointwise components (``i <= m``).
    """
    shapes = internal | connecting
    counts = {name: m if name in internal else m + 1 for name in shapes}
    found: dict[str, dict[int, IntMatrix]] = {name: {} for name in shapes}
    while (line := reader.peek()) is not None:
        reader.next("a matrix block")
        name = line.keyword
        if name not in shapes:
            raise reader.error(f"unknown block {name!r}", line)
        reader.arity(line, 2, f"{name} <i>")
        i = reader.natural(line.tokens[1], line, "block index")
        if i >= counts[name]:
            raise reader.error(f"block {name} {i} is out of range", line)
        if i in found[name]:
            raise reader.error(f"block {name} {i} appears twice", line)
        rows, cols = shapes[name](i)
        found[name][i] = reader.matrix(rows, cols, f"block {name} {i}")
    return {
        name: [
            found[name].get(i, np.zeros(shapes[name](i), dtype=np.int64))
            for i in range(counts[name])
        ]
        for name in shapes
    }


def parse_rawmod(
    text: str, path: str | None = None, field_prime: int | None = None
) -> RawModuleMorphism:
    """Parse a ``rawmod <m> <p>`` document into a pointwise morphism."""
    reader = _Reader(text, path)
    head, field = reader.header("rawmod", 2, field_prime, prime_required=True)
    m = reader.natural(head.tokens[1], head, "stabilization index")
    dims_m = _dims(reader, "dimsM", m + 1)
    dims_n = _dims(reader, "dimsN", m + 1)
    blocks = _blocks(
        reader,
        m,
        internal={
            "A": lambda i: (dims_m[i + 1], dims_m[i]),
            "B": lambda i: (dims_n[i + 1], dims_n[i]),
        },
        connecting={"C": lambda i: (dims_n[i], dims_m[i])},
    )
    return RawModuleMorphism.build(dims_m, dims_n, blocks["A"], blocks["B"], blocks["C"], field)


def parse_rawcplx(
    text: str, path: str | None = None, field_prime: int | None = None
) -> RawComplex:
    """Parse a ``rawcplx <m> <p>`` document into a pointwise complex."""
    reader = _Reader(text, path)
    head, field = reader.header("rawcplx", 2, field_prime, prime_required=True)
    m = reader.natural(head.tokens[1], head, "stabilization index")
    dims_l = _dims(reader, "dimsL", m + 1)
    dims_m = _dims(reader, "dimsM", m + 1)
    dims_n = _dims(reader, "dimsN", m + 1)
    blocks = _blocks(
        reader,
        m,
        internal={
            "L": lambda i: (dims_l[i + 1], dims_l[i]),
            "M": lambda i: (dims_m[i + 1], dims_m[i]),
            "N": lambda i: (dims_n[i + 1], dims_n[i]),
        },
        connecting={
            "F": lambda i: (dims_m[i], dims_l[i]),
            "G": lambda i: (dims_n[i], dims_m[i]),
        },
    )
    return RawComplex.build(
        (dims_l, dims_m, dims_n),
        (blocks["L"], blocks["M"], blocks["N"]),
        blocks["F"],
        blocks["G"],
        field,
    )


def _block_lines(blocks: dict[str, tuple[IntMatrix, ...]]) -> list[str]:
    lines = []
    for name, matrices in blocks.items():
        for i, matrix in enumerate(matrices):
            if matrix.any():
                lines.append(f"{name} {i}")
                lines += [" ".join(str(int(v)) for v in row) for row in matrix]
    return lines


def write_rawmod(raw: RawModuleMorphism) -> str:
    lines = [
        f"rawmod {raw.m} {raw.field.p}",
        "dimsM " + " ".join(map(str, raw.dims_m)),
        "dimsN " + " ".join(map(str, raw.dims_n)),
    ]
    lines += _block_lines({"A": raw.A, "B": raw.B, "C": raw.C})
    return "\n".join(lines) + "\n"


def write_rawcplx(raw: RawComplex) -> str:
    lines = [
        f"rawcplx {raw.m} {raw.field.p}",
        "dimsL " + " ".join(map(str, raw.dims_l)),
        "dimsM " + " ".join(map(str, raw.dims_m)),
        "dimsN " + " ".join(map(str, raw.dims_n)),
    ]
    lines += _block_lines({"L": raw.L, "M": raw.M, "N": raw.N, "F": raw.F, "G": raw.G})
    return "\n".join(lines) + "\n"


# TOWER / COSHEAF


def _events(reader: _Reader, stop: set[str]) -> list[IncludeEvent | CollapseEvent]:
    """Read ``i <t> v...`` and ``c <t> <from> <to>`` lines up to a keyword in ``stop``."""
    events: list[IncludeEvent | CollapseEvent] = []
    while (line := reader.peek()) is not None and line.keyword not in stop:
        reader.next("an event")
        if line.keyword not in {"i", "c"}:
            raise reader.error(f"unknown event kind {line.keyword!r}", line)
        if len(line.tokens) < 3:
            raise reader.error("an event needs a time and vertices", line)
        time = reader.natural(line.tokens[1], line, "event time")
        if time != len(events):
            raise reader.error(f"event time {time} is out of order, expected {len(events)}", line)
        vertices = [reader.natural(token, line, "vertex id") for token in line.tokens[2:]]
        if line.keyword == "i":
            events.append(
                reader.build(lambda: IncludeEvent(time=time, simplex=tuple(vertices)), line)
            )
        else:
            reader.arity(line, 4, "c <t> <from> <to>")
            events.append(
                reader.build(
                    lambda: CollapseEvent(time=time, source=vertices[0], target=vertices[1]),
                    line,
                )
            )
    return events


def parse_tower(
    text: str, path: str | None = None, field_prime: int | None = None
) -> TowerScript:
    """Parse a ``tower [p]`` document."""
    reader = _Reader(text, path)
    head, field = reader.header("tower", 1, field_prime, prime_required=False)
    events = _events(reader, stop=set())
    return reader.build(lambda: TowerScript(events=tuple(events), field_prime=field.p), head)


def parse_cosheaf(
    text: str, path: str | None = None, field_prime: int | None = None
) -> tuple[TowerScript, CosheafData]:
    """Parse a ``cosheaf [p]`` document: tower events, then stalks and extensions.

    ``stalk <simplex> <dim>`` must precede any ``ext <face> <coface>`` block
    that uses the simplex; an ``ext`` block holds the map from the coface
    stalk to the face stalk.
    """
    reader = _Reader(text, path)
    head, field = reader.header("cosheaf", 1, field_prime, prime_required=False)
    events = _events(reader, stop={"stalk", "ext"})
    stalks: dict[Simplex, int] = {}
    extensions: dict[tuple[Simplex, Simplex], IntMatrix] = {}
    while (line := reader.peek()) is not None:
        reader.next("a stalk or ext block")
        if line.keyword == "stalk":
            reader.arity(line, 3, "stalk <simplex> <dim>")
            simplex = reader.simplex(line.tokens[1], line)
            if simplex in stalks:
                raise reader.error(f"stalk over {simplex} given twice", line)
            stalks[simplex] = reader.natural(line.tokens[2], line, "stalk dimension")
        elif line.keyword == "ext":
            reader.arity(line, 3, "ext <face> <coface>")
            face = reader.simplex(line.tokens[1], line)
            coface = reader.simplex(line.tokens[2], line)
            for simplex in (face, coface):
                if simplex not in stalks:
                    raise reader.error(f"ext uses {simplex} before its stalk", line)
            extensions[(face, coface)] = reader.matrix(
                stalks[face], stalks[coface], f"ext {face} {coface}"
            )
        else:
            raise reader.error(f"unknown block {line.keyword!r}", line)
    script = reader.build(lambda: TowerScript(events=tuple(events), field_prime=field.p), head)
    cosheaf = reader.build(
        lambda: CosheafData(stalks=stalks, extensions=extensions, field_prime=field.p), head
    )
    return script, cosheaf


# SHEAF / POSET


@dataclass
class _StalkSections(Generic[C]):
    """``m``, ``stalk``, ``res`` and ``step`` records keyed by cell."""

    reader: _Reader
    cell: Callable[[str, _Line], C]
    m: int | None = None
    stalks: dict[C, tuple[int, ...]] = field(default_factory=dict)
    restrictions: dict[tuple[C, C, int], IntMatrix] = field(default_factory=dict)
    steps: dict[tuple[C, int], IntMatrix] = field(default_factory=dict)

    def read(self, line: _Line) -> bool:
        """Consume one record starting at ``line``; False if it is not one of ours."""
        reader = self.reader
        if line.keyword == "m":
            reader.arity(line, 2, "m <int>")
            if self.m is not None:
                raise reader.error("'m' given twice", line)
            self.m = reader.natural(line.tokens[1], line, "m")
            return True
        if line.keyword not in {"stalk", "res", "step"}:
            return False
        if self.m is None:
            raise reader.error(f"'{line.keyword}' before 'm'", line)
        if line.keyword == "stalk":
            self._stalk(line, self.m)
        elif line.keyword == "res":
            reader.arity(line, 4, "res <source> <target> <i>")
            source, target = self.cell(line.tokens[1], line), self.cell(line.tokens[2], line)
            i = self._index(line, line.tokens[3], self.m + 1)
            if (source, target, i) in self.restrictions:
                raise reader.error("restriction given twice", line)
            self.restrictions[(source, target, i)] = reader.matrix(
                self._dims(line, target)[i], self._dims(line, source)[i], f"res at {i}"
            )
        else:
            reader.arity(line, 3, "step <cell> <i>")
            key = self.cell(line.tokens[1], line)
            i = self._index(line, line.tokens[2], self.m)
            if (key, i) in self.steps:
                raise reader.error("step given twice", line)
            dims = self._dims(line, key)
            self.steps[(key, i)] = reader.matrix(dims[i + 1], dims[i], f"step at {i}")
        return True

    def _stalk(self, line: _Line, m: int) -> None:
        if len(line.tokens) != m + 3:
            raise self.reader.error(f"a stalk needs {m + 1} dimensions", line)
        key = self.cell(line.tokens[1], line)
        if key in self.stalks:
            raise self.reader.error(f"stalk over {key} given twice", line)
        self.stalks[key] = tuple(
            self.reader.natural(token, line, "stalk dimension") for token in line.tokens[2:]
        )

    def _dims(self, line: _Line, key: C) -> tuple[int, ...]:
        if key not in self.stalks:
            raise self.reader.error(f"{key} is used before its stalk", line)
        return self.stalks[key]

    def _index(self, line: _Line, token: str, limit: int) -> int:
        i = self.reader.natural(token, line, "index")
        if i >= limit:
            raise self.reader.error(f"index {i} is out of range", line)
        return i

    def require_m(self, head: _Line) -> int:
        if self.m is None:
            raise self.reader.error("missing 'm'", head)
        return self.m


def parse_sheaf(
    text: str, path: str | None = None, field_prime: int | None = None
) -> SheafInstance:
    """Parse a ``sheaf [p]`` document.

    The ``complex`` section lists maximal simplices, one per line as
    whitespace-separated vertex ids, until the next keyword.
    """
    reader = _Reader(text, path)
    head, field = reader.header("sheaf", 1, field_prime, prime_required=False)
    maximal: list[Simplex] | None = None
    sections = _StalkSections[Simplex](reader, reader.simplex)
    while (line := reader.peek()) is not None:
        reader.next("a section")
        if line.keyword == "complex":
            if maximal is not None:
                raise reader.error("'complex' given twice", line)
            maximal = []
            while (row := reader.peek()) is not None and row.keyword.isdigit():
                reader.next("a simplex")
                maximal.append(reader.simplex(",".join(row.tokens), row))
        elif not sections.read(line):
            raise reader.error(f"unknown section {line.keyword!r}", line)
    if maximal is None:
        raise reader.error("missing 'complex' section", head)
    m = sections.require_m(head)
    complex = SimplicialComplex.from_maximal(maximal)
    return reader.build(
        lambda: SheafInstance(
            complex=complex,
            m=m,
            stalks=sections.stalks,
            restrictions=sections.restrictions,
            steps=sections.steps,
            field_prime=field.p,
        ),
        head,
    )


def parse_poset(
    text: str, path: str | None = None, field_prime: int | None = None
) -> PosetSheafInstance:
    """Parse a ``poset [p]`` document; ``res`` blocks are allowed on covers only."""
    reader = _Reader(text, path)
    head, field = reader.header("poset", 1, field_prime, prime_required=False)
    elements: list[str] = []
    covers: list[tuple[str, str]] = []

    def label(token: str, line: _Line) -> str:
        if token not in elements:
            raise reader.error(f"unknown element {token!r}", line)
        return token

    sections = _StalkSections[str](reader, label)
    while (line := reader.peek()) is not None:
        reader.next("a section")
        if line.keyword == "elem":
            reader.arity(line, 2, "elem <label>")
            if line.tokens[1] in elements:
                raise reader.error(f"element {line.tokens[1]!r} declared twice", line)
            elements.append(line.tokens[1])
        elif line.keyword == "cover":
            reader.arity(line, 3, "cover <lo> <hi>")
            covers.append((label(line.tokens[1], line), label(line.tokens[2], line)))
        elif not sections.read(line):
            raise reader.error(f"unknown section {line.keyword!r}", line)
    m = sections.require_m(head)
    poset = reader.build(
        lambda: FinitePoset(elements=tuple(elements), covers=tuple(covers)), head
    )
    return reader.build(
        lambda: PosetSheafInstance(
            poset=poset,
            m=m,
            stalks=sections.stalks,
            restrictions=sections.restrictions,
            steps=sections.steps,
            field_prime=field.p,
        ),
        head,
    )


# Output


def format_barcode(barcode: Barcode) -> str:
    """One ``<degree> <birth> <death|inf>`` line per bar, sorted."""
    return "".join(f"{line}\n" for line in barcode.to_lines())


def read_document(
    path: str | Path,
    parser: Callable[[str, str | None, int | None], T],
    field_prime: int | None = None,
) -> T:
    """Read a UTF-8 file and parse it with ``parser``.

    Raises:
        ParseError: If the file cannot be read or parsed
    """
    name = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read document: {exc}", path=name) from None
    document = parser(text, name, field_prime)
    logger.debug("document_parsed", path=name, parser=parser.__name__)
    return document
