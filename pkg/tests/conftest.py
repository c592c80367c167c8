"""Pytest configuration and shared fixtures."""

import os
from collections.abc import Generator

import numpy as np
import pytest

from prescomplex.config.settings import get_settings
from prescomplex.core.barcode import INFINITY, Interval
from prescomplex.core.graded import AnnotatedMatrix, RawModuleMorphism
from prescomplex.core.simplicial import SimplicialComplex
from prescomplex.pipelines.poset import FinitePoset, PosetSheafInstance
from prescomplex.pipelines.sheaf import SheafInstance, interval_sheaf
from prescomplex.pipelines.tower import TowerScript

# Vertex ids of the collapsing tower.
U, V, W, Z = 0, 1, 2, 3


@pytest.fixture
def clean_env() -> Generator[None, None, None]:
    """Clear PRESCOMPLEX_* variables and the settings cache around a test."""
    original_env = dict(os.environ)
    for var in list(os.environ):
        if var.upper().startswith("PRESCOMPLEX_"):
            os.environ.pop(var, None)
    get_settings.cache_clear()

    yield

    os.environ.clear()
    os.environ.update(original_env)
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    """Deterministic random generator."""
    return np.random.default_rng(20240917)


@pytest.fixture
def triangle_intervals() -> dict[tuple[int, ...], Interval]:
    """Interval labels of the filled triangle used by the sheaf examples."""
    return {
        (0,): Interval(2, 6),
        (1,): Interval(1, 5),
        (2,): Interval(1, 7),
        (0, 1): Interval(0, 5),
        (1, 2): Interval(0, 5),
        (0, 2): Interval(1, 6),
        (0, 1, 2): Interval(0, 3),
    }


@pytest.fixture
def triangle_sheaf(
    triangle_intervals: dict[tuple[int, ...], Interval],
) -> SheafInstance:
    """Interval sheaf on a filled triangle over GF(2) with m = 7."""
    complex = SimplicialComplex.from_maximal([(0, 1, 2)])
    return interval_sheaf(complex, triangle_intervals, m=7)


@pytest.fixture
def sheaf_coboundaries() -> tuple[AnnotatedMatrix, AnnotatedMatrix]:
    """Presented coboundaries ``delta^0`` and ``delta^1`` of the triangle sheaf.

    Columns of ``f0`` are the vertices (0), (1), (2); its rows and the
    columns of ``g0`` are the edges (0,1), (1,2), (0,2); ``g0`` has the
    triangle as its single row.
    """
    edges = [Interval(0, 5), Interval(0, 5), Interval(1, 6)]
    f0 = AnnotatedMatrix.from_dense(
        [[1, 1, 0], [0, 1, 1], [1, 0, 1]],
        row_ann=edges,
        col_ann=[Interval(2, 6), Interval(1, 5), Interval(1, 7)],
    )
    g0 = AnnotatedMatrix.from_dense([[1, 1, 1]], row_ann=[Interval(0, 3)], col_ann=edges)
    return f0, g0


@pytest.fixture
def ladder_morphism() -> RawModuleMorphism:
    """Pointwise morphism with m = 2 whose presentation is known entry by entry."""
    return RawModuleMorphism.build(
        dims_m=[3, 3, 3],
        dims_n=[3, 3, 3],
        A=[
            [[0, 1, 0], [1, 1, 1], [1, 1, 1]],
            [[0, 1, 1], [0, 0, 0], [0, 1, 1]],
        ],
        B=[
            [[1, 1, 0], [1, 1, 0], [0, 0, 0]],
            [[1, 1, 1], [0, 1, 1], [0, 0, 1]],
        ],
        C=[
            [[0, 1, 1], [0, 1, 1], [1, 0, 0]],
            [[0, 0, 0], [0, 1, 1], [0, 0, 0]],
            [[1, 0, 0], [1, 0, 0], [0, 1, 0]],
        ],
    )


@pytest.fixture
def ladder_domain_bars() -> list[Interval]:
    return [
        Interval(0, 2),
        Interval(0, 2),
        Interval(0, 1),
        Interval(1, INFINITY),
        Interval(2, INFINITY),
        Interval(2, INFINITY),
    ]


@pytest.fixture
def ladder_codomain_bars() -> list[Interval]:
    return [
        Interval(0, INFINITY),
        Interval(0, 1),
        Interval(0, 1),
        Interval(1, INFINITY),
        Interval(1, INFINITY),
    ]


@pytest.fixture
def staircase_morphism() -> RawModuleMorphism:
    """The same modules as the ladder morphism, in a simpler basis."""
    return RawModuleMorphism.build(
        dims_m=[3, 3, 3],
        dims_n=[3, 3, 3],
        A=[
            [[1, 0, 0], [0, 1, 0], [0, 0, 0]],
            [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
        ],
        B=[
            [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
            [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        ],
        C=[
            [[0, 0, 0], [0, 1, 1], [1, 1, 1]],
            [[0, 0, 1], [0, 0, 1], [0, 0, 0]],
            [[1, 1, 1], [1, 1, 1], [0, 1, 0]],
        ],
    )


@pytest.fixture
def collapsing_tower() -> TowerScript:
    """A square with both diagonals' worth of edges, collapsed to a point.

    Vertices u, v, w, z and edges uv, vw, wz, uz, uw enter at times 0..8;
    then z collapses onto w, w onto v and v onto u.
    """
    return TowerScript.from_operations(
        [
            (U,),
            (V,),
            (W,),
            (Z,),
            (U, V),
            (V, W),
            (W, Z),
            (U, Z),
            (U, W),
            ("c", Z, W),
            ("c", W, V),
            ("c", V, U),
        ]
    )


@pytest.fixture
def filtered_triangle() -> TowerScript:
    """Inclusion-only filtration of a filled triangle, one simplex per index."""
    return TowerScript.from_operations(
        [(0,), (1,), (2,), (0, 1), (1, 2), (0, 2), (0, 1, 2)]
    )


@pytest.fixture
def v_poset() -> FinitePoset:
    """Two minima ``a`` and ``b`` below a single maximum ``c``."""
    return FinitePoset(elements=("a", "b", "c"), covers=(("a", "c"), ("b", "c")))


@pytest.fixture
def constant_v_sheaf(v_poset: FinitePoset) -> PosetSheafInstance:
    """The constant sheaf ``k`` on the V poset with m = 0."""
    one = np.ones((1, 1), dtype=np.int64)
    return PosetSheafInstance(
        poset=v_poset,
        m=0,
        stalks={x: (1,) for x in v_poset.elements},
        restrictions={(low, high, 0): one for low, high in v_poset.covers},
    )
