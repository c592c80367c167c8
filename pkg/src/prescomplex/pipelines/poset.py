"""Persistent sheaves over finite posets.

Sheaf cohomology over a poset equals the cohomology of the pulled-back
sheaf on its order complex (the complex of all chains, projected to their
maxima). The order complex can be exponentially large, so its size is
computed exactly before any chain is enumerated and checked against a
configurable limit.

Zigzag posets, whose Hasse diagram is a path, admit a much smaller route:
the subposet of alternating minima and maxima is the face poset of a
graph and carries the same cohomology.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from prescomplex.config.logging import get_logger
from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import Barcode
from prescomplex.core.graded import IntMatrix
from prescomplex.core.simplicial import Simplex, SimplicialComplex
from prescomplex.core.validator import InvariantViolation, SizeLimitExceeded
from prescomplex.pipelines.sheaf import Method, SheafInstance, persistent_sheaf_cohomology

logger = get_logger(__name__)

Route = Literal["auto", "order_complex", "zigzag"]


class FinitePoset(BaseModel):
    """A finite poset given by its elements and Hasse-diagram covers.

    Elements keep their declaration order; vertex ids of derived complexes
    follow a topological order that breaks ties by that declaration order.
    """

    model_config = ConfigDict(frozen=True)

    elements: tuple[str, ...]
    covers: tuple[tuple[str, str], ...] = ()

    @model_validator(mode="after")
    def _check(self) -> FinitePoset:
        known = set(self.elements)
        if len(known) != len(self.elements):
            raise InvariantViolation("poset elements must be distinct")
        for low, high in self.covers:
            if low not in known or high not in known:
                raise InvariantViolation(
                    f"cover {low} < {high} uses an undeclared element", entity=(low, high)
                )
            if low == high:
                raise InvariantViolation(f"cover {low} < {low} is a loop", entity=(low, high))
        graph = self.graph
        if not nx.is_directed_acyclic_graph(graph):
            cycle = [edge[0] for edge in nx.find_cycle(graph)]
            raise InvariantViolation(f"covers form a cycle through {cycle}", entity=cycle)
        reduced = nx.transitive_reduction(graph)
        for low, high in self.covers:
            if not reduced.has_edge(low, high):
                raise InvariantViolation(
                    f"{low} < {high} is implied by other covers", entity=(low, high)
                )
        return self

    @cached_property
    def graph(self) -> nx.DiGraph:
        """Hasse diagram with edges pointing upwards."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.elements)
        graph.add_edges_from(self.covers)
        return graph

    @cached_property
    def closure(self) -> nx.DiGraph:
        return nx.transitive_closure_dag(self.graph)

    @cached_property
    def order(self) -> tuple[str, ...]:
        """Linear extension, ties broken by declaration order."""
        position = {x: n for n, x in enumerate(self.elements)}
        return tuple(nx.lexicographical_topological_sort(self.graph, key=position.__getitem__))

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: n for n, x in enumerate(self.order)}

    def leq(self, x: str, y: str) -> bool:
        return x == y or bool(self.closure.has_edge(x, y))

    def minimal(self) -> list[str]:
        return [x for x in self.elements if self.graph.in_degree(x) == 0]

    def maximal(self) -> list[str]:
        return [x for x in self.elements if self.graph.out_degree(x) == 0]

    def is_zigzag(self) -> bool:
        """Whether the undirected Hasse diagram is a path."""
        undirected = self.graph.to_undirected()
        if len(self.elements) == 0:
            return False
        return (
            nx.is_connected(undirected)
            and undirected.number_of_edges() == len(self.elements) - 1
            and max(d for _, d in undirected.degree()) <= 2
        )

    def path(self) -> list[str]:
        """Elements along the Hasse path, from the endpoint declared first.

        Raises:
            InvariantViolation: If the poset is not a zigzag
        """
        if not self.is_zigzag():
            raise InvariantViolation("poset is not a zigzag")
        undirected = self.graph.to_undirected()
        if len(self.elements) == 1:
            return list(self.elements)
        start = next(x for x in self.elements if undirected.degree(x) == 1)
        walk = [start]
        previous = None
        while len(walk) < len(self.elements):
            current = walk[-1]
            step = next(y for y in undirected.neighbors(current) if y != previous)
            previous = current
            walk.append(step)
        return walk


class PosetSheafInstance(BaseModel):
    """A persistent sheaf on a finite poset.

    Restrictions are given on covers only and extend to every relation
    ``x <= y`` by composing along a Hasse path; the result must not depend
    on the path.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    poset: FinitePoset
    m: int = Field(ge=0)
    stalks: dict[str, tuple[int, ...]]
    restrictions: dict[tuple[str, str, int], np.ndarray] = Field(default_factory=dict)
    steps: dict[tuple[str, int], np.ndarray] = Field(default_factory=dict)
    field_prime: int = 2

    @field_validator("restrictions", "steps", mode="before")
    @classmethod
    def _matrices(cls, value: Mapping[object, object]) -> dict[object, np.ndarray]:
        return {key: np.asarray(matrix, dtype=np.int64) for key, matrix in value.items()}

    @model_validator(mode="after")
    def _check(self) -> PosetSheafInstance:
        for x in self.poset.elements:
            dims = self.stalks.get(x)
            if dims is None or len(dims) != self.m + 1:
                raise InvariantViolation(
                    f"stalk over {x} needs {self.m + 1} dimensions", entity=x
                )
        for (x, i), matrix in self.steps.items():
            if x not in self.stalks or not 0 <= i < self.m:
                raise InvariantViolation(f"step {x} at {i} is outside the sheaf", entity=(x, i))
            if matrix.size and matrix.shape != (self.dim(x, i + 1), self.dim(x, i)):
                raise InvariantViolation(
                    f"step {x} at {i} has shape {matrix.shape}", entity=(x, i)
                )
        covers = set(self.poset.covers)
        for low, high, i in self.restrictions:
            if (low, high) not in covers:
                raise InvariantViolation(
                    f"restriction {low} <= {high} is not on a cover", entity=(low, high, i)
                )
        for low, high in self.poset.covers:
            for i in range(self.m + 1):
                expected = (self.dim(high, i), self.dim(low, i))
                if self.cover_map(low, high, i).shape != expected:
                    raise InvariantViolation(
                        f"restriction {low} <= {high} at {i} has the wrong shape",
                        entity=(low, high, i),
                    )
            for i in range(self.m):
                left = self.cover_map(low, high, i + 1) @ self.step(low, i)
                right = self.step(high, i) @ self.cover_map(low, high, i)
                if not np.array_equal(left % self.field_prime, right % self.field_prime):
                    raise InvariantViolation(
                        f"steps are not natural for {low} <= {high} at index {i}",
                        entity=(low, high, i),
                    )
        self._check_functoriality()
        return self

    def _check_functoriality(self) -> None:
        p = self.field_prime
        closure = self.poset.closure
        for x in self.poset.elements:
            for y in closure.successors(x):
                routes = [z for z in self.poset.graph.successors(x) if self.poset.leq(z, y)]
                for i in range(self.m + 1):
                    products = [
                        (self.restriction(z, y, i) @ self.cover_map(x, z, i)) % p
                        for z in routes
                    ]
                    if any(not np.array_equal(products[0], other) for other in products[1:]):
                        raise InvariantViolation(
                            f"restrictions from {x} to {y} depend on the path at index {i}",
                            entity=(x, y, i),
                        )

    def dim(self, x: str, i: int) -> int:
        return self.stalks[x][i]

    def cover_map(self, low: str, high: str, i: int) -> IntMatrix:
        matrix = self.restrictions.get((low, high, i))
        if matrix is None or matrix.size == 0:
            return np.zeros((self.dim(high, i), self.dim(low, i)), dtype=np.int64)
        return matrix

    def step(self, x: str, i: int) -> IntMatrix:
        matrix = self.steps.get((x, i))
        if matrix is None or matrix.size == 0:
            return np.zeros((self.dim(x, i + 1), self.dim(x, i)), dtype=np.int64)
        return matrix

    def restriction(self, x: str, y: str, i: int) -> IntMatrix:
        """``F_i(x) -> F_i(y)`` for ``x <= y``, composed along a Hasse path."""
        if x == y:
            return np.eye(self.dim(x, i), dtype=np.int64)
        if not self.poset.leq(x, y):
            raise InvariantViolation(f"{x} is not below {y}", entity=(x, y))
        walk = nx.shortest_path(self.poset.graph, x, y)
        result = np.eye(self.dim(x, i), dtype=np.int64)
        for low, high in zip(walk, walk[1:], strict=False):
            result = (self.cover_map(low, high, i) @ result) % self.field_prime
        return result


def count_chains(poset: FinitePoset) -> int:
    """Number of nonempty chains, by dynamic programming over a linear extension."""
    ending: dict[str, int] = {}
    for x in poset.order:
        ending[x] = 1 + sum(ending[y] for y in poset.closure.predecessors(x))
    return sum(ending.values())


@dataclass(frozen=True)
class OrderComplex:
    """Chains of a poset as simplices on the linear-extension indices."""

    complex: SimplicialComplex
    labels: tuple[str, ...]

    def projection(self, chain: Simplex) -> str:
        """The maximum of a chain."""
        return self.labels[chain[-1]]


def order_complex(poset: FinitePoset, limit: int | None = None) -> OrderComplex:
    """Enumerate all chains of ``poset``.

    Args:
        poset: Finite poset
        limit: Largest admissible number of simplices; defaults to the
            configured ``order_complex_limit``

    Returns:
        OrderComplex whose vertex ``n`` is the ``n``-th element of the linear
        extension

    Raises:
        SizeLimitExceeded: If the chain count exceeds ``limit``
    """
    if limit is None:
        limit = get_settings().order_complex_limit
    total = count_chains(poset)
    if total > limit:
        advice = "; use the zigzag route" if poset.is_zigzag() else ""
        raise SizeLimitExceeded(
            f"order complex has {total} simplices, above the limit {limit}{advice}",
            entity=total,
        )
    if total > limit // 2:
        logger.warning("order_complex_near_limit", simplices=total, limit=limit)

    index = poset.index
    above = {
        index[x]: sorted(index[y] for y in poset.closure.successors(x))
        for x in poset.elements
    }
    chains: list[Simplex] = []

    def extend(chain: Simplex) -> None:
        chains.append(chain)
        for nxt in above[chain[-1]]:
            extend(chain + (nxt,))

    for start in range(len(poset.order)):
        extend((start,))
    simplices = tuple(sorted(chains, key=lambda s: (len(s), s)))
    logger.info("order_complex_built", elements=len(poset.elements), simplices=len(simplices))
    return OrderComplex(SimplicialComplex(simplices), poset.order)


def pullback_to_order_complex(
    S: PosetSheafInstance, limit: int | None = None
) -> SheafInstance:
    """Pull a poset sheaf back along the projection of its order complex."""
    oc = order_complex(S.poset, limit)
    stalks = {chain: S.stalks[oc.projection(chain)] for chain in oc.complex.simplices}
    restrictions = {}
    for face, coface in oc.complex.facet_pairs():
        low, high = oc.projection(face), oc.projection(coface)
        for i in range(S.m + 1):
            matrix = S.restriction(low, high, i)
            if matrix.size:
                restrictions[(face, coface, i)] = matrix
    steps = {
        (chain, i): S.step(oc.projection(chain), i)
        for chain in oc.complex.simplices
        for i in range(S.m)
    }
    return SheafInstance(
        complex=oc.complex,
        m=S.m,
        stalks=stalks,
        restrictions=restrictions,
        steps=steps,
        field_prime=S.field_prime,
    )


def alternating_subposet(poset: FinitePoset) -> tuple[FinitePoset, dict[str, str]]:
    """Alternating minima and maxima along the path of a zigzag poset.

    Starting from the minimal element with the smallest path position, the
    scan takes the next maximal element, then the next minimal one, and so
    on until the path is exhausted. A trailing maximal element is dropped, so
    the result starts and ends with minimal elements.

    Returns:
        The subposet, with consecutive chosen elements as covers, and its
        inclusion map into ``poset``

    Raises:
        InvariantViolation: If the poset is not a zigzag
    """
    walk = poset.path()
    minimal, maximal = set(poset.minimal()), set(poset.maximal())
    chosen: list[str] = []
    want_minimal = True
    for x in walk:
        if (want_minimal and x in minimal) or (not want_minimal and x in maximal):
            chosen.append(x)
            want_minimal = not want_minimal
    if chosen and chosen[-1] not in minimal:
        chosen.pop()
    covers = []
    for a, b in zip(chosen, chosen[1:], strict=False):
        covers.append((a, b) if poset.leq(a, b) else (b, a))
    sub = FinitePoset(elements=tuple(chosen), covers=tuple(covers))
    logger.debug("alternating_subposet", elements=len(poset.elements), kept=len(chosen))
    return sub, {x: x for x in chosen}


def zigzag_sheaf(S: PosetSheafInstance) -> SheafInstance:
    """The sheaf on the graph whose face poset is the alternating subposet.

    Minima become vertices, maxima with two lower neighbours become edges.
    Every maximum of the alternating subposet sits between two minima.
    """
    sub, _ = alternating_subposet(S.poset)
    chosen = list(sub.elements)
    vertices = chosen[0::2]
    edges = [
        (n, chosen[2 * n + 1]) for n in range(len(vertices) - 1)
    ]
    maximal_simplices = [(n,) for n in range(len(vertices))]
    maximal_simplices += [(n, n + 1) for n, _ in edges]
    complex = SimplicialComplex.from_maximal(maximal_simplices)

    label: dict[Simplex, str] = {(n,): x for n, x in enumerate(vertices)}
    label.update({(n, n + 1): y for n, y in edges})
    stalks = {s: S.stalks[label[s]] for s in complex.simplices}
    restrictions = {}
    for face, coface in complex.facet_pairs():
        for i in range(S.m + 1):
            restrictions[(face, coface, i)] = S.restriction(label[face], label[coface], i)
    steps = {
        (s, i): S.step(label[s], i) for s in complex.simplices for i in range(S.m)
    }
    return SheafInstance(
        complex=complex,
        m=S.m,
        stalks=stalks,
        restrictions=restrictions,
        steps=steps,
        field_prime=S.field_prime,
    )


def poset_cohomology(
    S: PosetSheafInstance,
    k: int,
    route: Route = "auto",
    limit: int | None = None,
    method: Method | None = None,
    threads: int | None = None,
    keep_empty: bool | None = None,
) -> Barcode:
    """Barcode of ``H^k`` of a persistent sheaf on a finite poset.

    Args:
        S: Valid poset sheaf
        k: Cohomology degree
        route: "zigzag" uses the alternating subposet, "order_complex" the
            full order complex; "auto" picks zigzag whenever it applies
        limit: Order-complex size guard
        method: Sheaf route passed to the sheaf pipeline
        threads: Parallel width
        keep_empty: Keep zero-length bars

    Raises:
        SizeLimitExceeded: If the order complex is too large
        InvariantViolation: If the zigzag route is forced on a non-zigzag
    """
    if route == "auto":
        route = "zigzag" if S.poset.is_zigzag() else "order_complex"
    if route == "zigzag":
        pulled = zigzag_sheaf(S)
    else:
        pulled = pullback_to_order_complex(S, limit)
    logger.info("poset_route_chosen", route=route, degree=k, simplices=len(pulled.complex))
    return persistent_sheaf_cohomology(
        pulled, k, method=method, threads=threads, keep_empty=keep_empty
    )
