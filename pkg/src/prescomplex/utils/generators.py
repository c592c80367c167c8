"""Random valid instances for property tests and benchmarks.

Every generator takes a ``numpy.random.Generator`` so that hypothesis can
drive it through a drawn seed and failures replay deterministically.
"""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from typing import TypeVar

import networkx as nx
import numpy as np

from ..core.barcode import INFINITY, Degree, Interval
from ..core.field import PrimeField
from ..core.graded import (
    AnnotatedMatrix,
    IntMatrix,
    RawComplex,
    RawModule,
    RawModuleMorphism,
    reconstruct_pointwise,
)
from ..core.simplicial import Simplex, SimplicialComplex, relabel_sign
from ..pipelines.poset import FinitePoset, PosetSheafInstance
from ..pipelines.sheaf import SheafInstance, interval_sheaf
from ..pipelines.tower import CollapseEvent, IncludeEvent, TowerScript
from .oracle import random_invertible

K = TypeVar("K", bound=Hashable)


def random_interval(rng: np.random.Generator, horizon: int) -> Interval:
    """Nonempty interval with endpoints in ``0 .. horizon`` or an infinite death."""
    birth = int(rng.integers(0, horizon + 1))
    if birth == horizon or rng.random() < 0.3:
        return Interval(birth, INFINITY)
    return Interval(birth, int(rng.integers(birth + 1, horizon + 1)))


def random_annotated_matrix(
    rng: np.random.Generator,
    n_rows: int,
    n_cols: int,
    horizon: int = 6,
    field: PrimeField | None = None,
    density: float = 0.5,
) -> AnnotatedMatrix:
    """Valid annotated matrix with random bars and random legal entries."""
    field = field or PrimeField()
    rows = [random_interval(rng, horizon) for _ in range(n_rows)]
    cols = [random_interval(rng, horizon) for _ in range(n_cols)]
    columns = []
    for col in cols:
        column = {}
        for k, row in enumerate(rows):
            if row.birth <= col.birth and row.death <= col.death and rng.random() < density:
                column[k] = int(rng.integers(1, field.p))
        columns.append(column)
    return AnnotatedMatrix.from_columns(rows, cols, columns, field)


def random_raw_module(
    rng: np.random.Generator, m: int, max_dim: int, field: PrimeField | None = None
) -> RawModule:
    """Module with random dimensions and unconstrained random structure maps."""
    field = field or PrimeField()
    dims = [int(rng.integers(0, max_dim + 1)) for _ in range(m + 1)]
    maps = [
        rng.integers(0, field.p, size=(dims[i + 1], dims[i]), dtype=np.int64)
        for i in range(m)
    ]
    return RawModule.build(dims, maps, field)


def _inverse(matrix: IntMatrix, field: PrimeField) -> IntMatrix:
    if matrix.shape[0] == 0:
        return matrix
    return np.asarray(np.linalg.inv(field.array(matrix)), dtype=np.int64)


def _conjugators(
    rng: np.random.Generator, dims: Sequence[int], field: PrimeField
) -> list[tuple[IntMatrix, IntMatrix]]:
    bases = []
    for n in dims:
        basis = random_invertible(n, field, rng)
        bases.append((basis, _inverse(basis, field)))
    return bases


def random_raw_morphism(
    rng: np.random.Generator,
    m: int,
    max_dim: int,
    field: PrimeField | None = None,
) -> RawModuleMorphism:
    """Pointwise morphism obtained from a random presentation by random base changes."""
    field = field or PrimeField()
    presented = random_annotated_matrix(
        rng,
        int(rng.integers(0, max_dim + 1)),
        int(rng.integers(0, max_dim + 1)),
        horizon=m,
        field=field,
    )
    raw = reconstruct_pointwise(presented, horizon=m)
    P = _conjugators(rng, raw.dims_m, field)
    Q = _conjugators(rng, raw.dims_n, field)
    mm = field.matmul
    A = [mm(mm(P[i + 1][0], raw.A[i]), P[i][1]) for i in range(m)]
    B = [mm(mm(Q[i + 1][0], raw.B[i]), Q[i][1]) for i in range(m)]
    C = [mm(mm(Q[i][0], raw.C[i]), P[i][1]) for i in range(m + 1)]
    return RawModuleMorphism.build(raw.dims_m, raw.dims_n, A, B, C, field)


def random_raw_complex(
    rng: np.random.Generator,
    m: int,
    max_dim: int,
    field: PrimeField | None = None,
) -> RawComplex:
    """Pointwise complex ``L -> M -> N`` with ``G F = 0``.

    ``M -> N`` is a random morphism; ``L`` is a sum of interval modules, each
    generated by a random kernel element of ``G`` and dying where the
    element's image in ``M`` vanishes.
    """
    field = field or PrimeField()
    second = random_raw_morphism(rng, m, max_dim, field)
    middle = second.domain()
    intervals: list[Interval] = []
    images: list[dict[int, IntMatrix]] = []
    for _ in range(int(rng.integers(0, max_dim + 1))):
        birth = int(rng.integers(0, m + 1))
        if middle.dims[birth] == 0:
            continue
        G = second.C[birth]
        if G.shape[0] == 0 or not G.any():
            kernel = np.eye(middle.dims[birth], dtype=np.int64)
        else:
            kernel = np.asarray(field.array(G).null_space().T, dtype=np.int64)
        if kernel.shape[1] == 0:
            continue
        vector = field.matmul(
            kernel, rng.integers(0, field.p, size=(kernel.shape[1], 1), dtype=np.int64)
        )
        trace: dict[int, IntMatrix] = {}
        death: Degree = INFINITY
        for i in range(birth, m + 1):
            if not vector.any():
                death = i
                break
            trace[i] = vector
            if i < m:
                vector = field.matmul(middle.maps[i], vector)
        if death == birth:
            continue
        intervals.append(Interval(birth, death))
        images.append(trace)

    alive = [[n for n, bar in enumerate(intervals) if bar.contains(i)] for i in range(m + 1)]
    dims_l = [len(a) for a in alive]
    L = []
    for i in range(m):
        step = np.zeros((dims_l[i + 1], dims_l[i]), dtype=np.int64)
        target = {n: pos for pos, n in enumerate(alive[i + 1])}
        for pos, n in enumerate(alive[i]):
            if n in target:
                step[target[n], pos] = 1
        L.append(step)
    F = []
    for i in range(m + 1):
        block = np.zeros((middle.dims[i], dims_l[i]), dtype=np.int64)
        for pos, n in enumerate(alive[i]):
            block[:, pos] = images[n][i][:, 0]
        F.append(block)
    return RawComplex.build(
        (dims_l, second.dims_m, second.dims_n),
        (L, second.A, second.B),
        F,
        second.C,
        field,
    )


def random_filtration(
    rng: np.random.Generator,
    n_vertices: int,
    n_simplices: int,
    max_dim: int = 2,
    field_prime: int = 2,
) -> TowerScript:
    """Inclusion-only tower adding random simplices after their faces."""
    maximal = []
    for _ in range(max(1, n_simplices // 3)):
        size = int(rng.integers(1, min(max_dim, n_vertices - 1) + 2))
        vertices = rng.choice(n_vertices, size=size, replace=False)
        maximal.append(tuple(sorted(int(v) for v in vertices)))
    closure = SimplicialComplex.from_maximal(maximal).simplices
    pending = list(closure)
    present: set[Simplex] = set()
    events = []
    while pending and len(events) < n_simplices:
        ready = [
            s for s in pending
            if len(s) == 1 or all(s[:j] + s[j + 1 :] in present for j in range(len(s)))
        ]
        choice = ready[int(rng.integers(0, len(ready)))]
        pending.remove(choice)
        present.add(choice)
        events.append(IncludeEvent(time=len(events), simplex=choice))
    return TowerScript(events=tuple(events), field_prime=field_prime)


def random_tower(
    rng: np.random.Generator,
    n_inclusions: int,
    n_collapses: int,
    max_dim: int = 2,
    field_prime: int = 2,
) -> TowerScript:
    """Random valid tower mixing inclusions and vertex collapses."""
    live: set[Simplex] = set()
    next_vertex = 0
    events: list[IncludeEvent | CollapseEvent] = []
    inclusions = collapses = 0
    while inclusions < n_inclusions or collapses < n_collapses:
        vertices = sorted(s[0] for s in live if len(s) == 1)
        want_collapse = collapses < n_collapses and len(vertices) >= 2 and (
            inclusions >= n_inclusions or rng.random() < 0.25
        )
        if want_collapse:
            source, target = (int(v) for v in rng.choice(vertices, size=2, replace=False))
            moved = set()
            for simplex in live:
                if source not in simplex:
                    moved.add(simplex)
                elif target not in simplex:
                    moved.add(relabel_sign(simplex, source, target)[0])
            live = moved
            events.append(CollapseEvent(time=len(events), source=source, target=target))
            collapses += 1
            continue
        if inclusions >= n_inclusions:
            # Too few vertices remain for the outstanding collapses.
            n_collapses = collapses
            continue
        candidates = _cofaces_to_add(live, vertices, max_dim)
        if not candidates or rng.random() < 0.3:
            simplex: Simplex = (next_vertex,)
            next_vertex += 1
        else:
            simplex = candidates[int(rng.integers(0, len(candidates)))]
        live.add(simplex)
        events.append(IncludeEvent(time=len(events), simplex=simplex))
        inclusions += 1
    return TowerScript(events=tuple(events), field_prime=field_prime)


def _cofaces_to_add(live: set[Simplex], vertices: list[int], max_dim: int) -> list[Simplex]:
    found = set()
    for simplex in live:
        if len(simplex) > max_dim:
            continue
        for v in vertices:
            if v in simplex:
                continue
            coface = tuple(sorted(simplex + (v,)))
            if coface in live:
                continue
            if all(coface[:j] + coface[j + 1 :] in live for j in range(len(coface))):
                found.add(coface)
    return sorted(found)


def _label_intervals(
    rng: np.random.Generator, heights: dict[K, int], m: int
) -> dict[K, Interval]:
    """Intervals with births and deaths non-increasing in the height."""
    birth_top = int(rng.integers(0, m)) if m > 0 else 0
    if m == 0 or rng.random() < 0.3:
        death_top: Degree = INFINITY
    else:
        death_top = int(rng.integers(birth_top + 1, m + 1))
    result = {}
    for key, height in heights.items():
        birth = max(0, birth_top - height)
        death = death_top if death_top == INFINITY else max(death_top - height, birth + 1)
        result[key] = Interval(birth, death)
    return result


def random_interval_sheaf(
    rng: np.random.Generator,
    complex: SimplicialComplex,
    m: int,
    labels: int = 2,
    field_prime: int = 2,
    conjugate: bool = False,
) -> SheafInstance:
    """Sum of ``labels`` interval sheaves with legal identity restrictions.

    Every simplex carries all labels; per label births and deaths do not
    increase with dimension, so every restriction is a legal identity.
    With ``conjugate`` each stalk gets a random basis at every index.
    """
    parts = [
        interval_sheaf(
            complex,
            _label_intervals(rng, {s: len(s) - 1 for s in complex.simplices}, m),
            m,
            field_prime,
        )
        for _ in range(labels)
    ]
    sheaf = direct_sum(parts)
    return conjugate_sheaf(rng, sheaf) if conjugate else sheaf


def direct_sum(parts: Sequence[SheafInstance]) -> SheafInstance:
    """Block-diagonal sum of sheaves on the same complex."""
    first = parts[0]
    complex, m = first.complex, first.m

    def block(matrices: list[IntMatrix]) -> IntMatrix:
        rows = sum(a.shape[0] for a in matrices)
        cols = sum(a.shape[1] for a in matrices)
        out = np.zeros((rows, cols), dtype=np.int64)
        r = c = 0
        for a in matrices:
            out[r : r + a.shape[0], c : c + a.shape[1]] = a
            r, c = r + a.shape[0], c + a.shape[1]
        return out

    stalks = {
        s: tuple(sum(part.dim(s, i) for part in parts) for i in range(m + 1))
        for s in complex.simplices
    }
    restrictions = {
        (face, coface, i): block([part.restriction(face, coface, i) for part in parts])
        for face, coface in complex.facet_pairs()
        for i in range(m + 1)
    }
    steps = {
        (s, i): block([part.step(s, i) for part in parts])
        for s in complex.simplices
        for i in range(m)
    }
    return SheafInstance(
        complex=complex,
        m=m,
        stalks=stalks,
        restrictions=restrictions,
        steps=steps,
        field_prime=first.field_prime,
    )


def conjugate_sheaf(rng: np.random.Generator, sheaf: SheafInstance) -> SheafInstance:
    """Isomorphic sheaf under a random change of basis of every stalk."""
    field = sheaf.field
    bases = {
        (s, i): _conjugators(rng, [sheaf.dim(s, i)], field)[0]
        for s in sheaf.complex.simplices
        for i in range(sheaf.m + 1)
    }
    mm = field.matmul
    restrictions = {
        (face, coface, i): mm(
            mm(bases[(coface, i)][0], sheaf.restriction(face, coface, i)),
            bases[(face, i)][1],
        )
        for face, coface in sheaf.complex.facet_pairs()
        for i in range(sheaf.m + 1)
    }
    steps = {
        (s, i): mm(mm(bases[(s, i + 1)][0], sheaf.step(s, i)), bases[(s, i)][1])
        for s in sheaf.complex.simplices
        for i in range(sheaf.m)
    }
    return sheaf.model_copy(update={"restrictions": restrictions, "steps": steps})


def random_zigzag_poset(rng: np.random.Generator, n_elements: int) -> FinitePoset:
    """Path poset ``x0 - x1 - ...`` with random cover directions."""
    elements = tuple(f"x{n}" for n in range(n_elements))
    covers = []
    for a, b in zip(elements, elements[1:], strict=False):
        covers.append((a, b) if rng.random() < 0.5 else (b, a))
    return FinitePoset(elements=elements, covers=tuple(covers))


def random_poset_sheaf(
    rng: np.random.Generator,
    poset: FinitePoset,
    m: int,
    labels: int = 2,
    field_prime: int = 2,
) -> PosetSheafInstance:
    """Sum of interval sheaves on a poset with random scalar restrictions.

    Per label, births and deaths do not increase along covers. Scalars on
    covers are only functorial when every pair of Hasse paths agrees, so
    outside trees (zigzags) all scalars are one.
    """
    field = PrimeField(field_prime)
    heights = {x: 0 for x in poset.order}
    for x in poset.order:
        for y in poset.graph.successors(x):
            heights[y] = max(heights[y], heights[x] + 1)
    is_tree = nx.is_forest(poset.graph.to_undirected())
    per_label = [_label_intervals(rng, heights, m) for _ in range(labels)]
    scalars = [
        {
            cover: int(rng.integers(0, field.p)) if is_tree else 1
            for cover in poset.covers
        }
        for _ in range(labels)
    ]

    def alive(x: str, i: int) -> list[int]:
        return [n for n in range(labels) if per_label[n][x].contains(i)]

    stalks = {x: tuple(len(alive(x, i)) for i in range(m + 1)) for x in poset.elements}
    steps = {}
    for x in poset.elements:
        for i in range(m):
            src, dst = alive(x, i), alive(x, i + 1)
            matrix = np.zeros((len(dst), len(src)), dtype=np.int64)
            for pos, n in enumerate(src):
                if n in dst:
                    matrix[dst.index(n), pos] = 1
            steps[(x, i)] = matrix
    restrictions = {}
    for low, high in poset.covers:
        for i in range(m + 1):
            src, dst = alive(low, i), alive(high, i)
            matrix = np.zeros((len(dst), len(src)), dtype=np.int64)
            for pos, n in enumerate(src):
                if n in dst:
                    matrix[dst.index(n), pos] = scalars[n][(low, high)]
            restrictions[(low, high, i)] = matrix
    return PosetSheafInstance(
        poset=poset,
        m=m,
        stalks=stalks,
        restrictions=restrictions,
        steps=steps,
        field_prime=field_prime,
    )


def random_zigzag_sheaf(
    rng: np.random.Generator, n_elements: int, m: int, labels: int = 2, field_prime: int = 2
) -> PosetSheafInstance:
    return random_poset_sheaf(rng, random_zigzag_poset(rng, n_elements), m, labels, field_prime)


def erdos_renyi_sheaf(
    rng: np.random.Generator, n_vertices: int, m: int, edge_probability: float = 0.4
) -> SheafInstance:
    """Interval sheaf on an Erdős–Rényi graph.

    Every vertex carries ``[b, inf)`` with a random birth ``b`` and every
    edge ``[0, inf)``, so each restriction is a legal identity and each local
    module has a single generator.
    """
    graph = nx.erdos_renyi_graph(n_vertices, edge_probability, seed=int(rng.integers(2**31)))
    maximal: list[tuple[int, ...]] = [(int(v),) for v in graph.nodes]
    maximal += [tuple(sorted((int(a), int(b)))) for a, b in graph.edges]
    complex = SimplicialComplex.from_maximal(maximal)
    intervals = {
        s: Interval(int(rng.integers(0, m + 1)) if len(s) == 1 else 0)
        for s in complex.simplices
    }
    return interval_sheaf(complex, intervals, m)


__all__ = [
    "conjugate_sheaf",
    "direct_sum",
    "erdos_renyi_sheaf",
    "random_annotated_matrix",
    "random_filtration",
    "random_interval",
    "random_interval_sheaf",
    "random_poset_sheaf",
    "random_raw_complex",
    "random_raw_module",
    "random_raw_morphism",
    "random_tower",
    "random_zigzag_poset",
    "random_zigzag_sheaf",
]
