"""Randomized acceptance runs, deselected by default (``pytest -m slow``)."""

import io
import time
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from prescomplex.cli import EXIT_OK, run
from prescomplex.core.barcode import Barcode
from prescomplex.core.complexify import complexify_pair
from prescomplex.core.field import PrimeField
from prescomplex.core.homology import persistence_algorithm, pres_hom
from prescomplex.core.presentation import pres_complex
from prescomplex.pipelines.poset import poset_cohomology
from prescomplex.pipelines.sheaf import SheafInstance, persistent_sheaf_cohomology
from prescomplex.pipelines.tower import TowerScript, tower_homology, tower_presentations
from prescomplex.utils.generators import (
    erdos_renyi_sheaf,
    random_filtration,
    random_raw_complex,
    random_zigzag_sheaf,
)
from prescomplex.utils.monitoring import OperationCounter
from prescomplex.utils.oracle import pointwise_homology_barcode

pytestmark = pytest.mark.slow


def _ladder(n: int) -> TowerScript:
    """Two rails of ``n`` vertices joined by rungs, then zipped together."""
    top = list(range(n))
    bottom = list(range(n, 2 * n))
    operations: list[tuple[object, ...]] = [(v,) for v in top + bottom]
    operations += [(top[i], top[i + 1]) for i in range(n - 1)]
    operations += [(bottom[i], bottom[i + 1]) for i in range(n - 1)]
    operations += [(top[i], bottom[i]) for i in range(n)]
    operations += [("c", bottom[i], top[i]) for i in range(n)]
    return TowerScript.from_operations(operations)


def _sheaf_document(sheaf: SheafInstance) -> str:
    """Render ``sheaf`` in the SHEAF format, leaving zero blocks out."""

    def token(simplex: tuple[int, ...]) -> str:
        return ",".join(str(v) for v in simplex)

    def block(header: str, matrix: np.ndarray) -> list[str]:
        matrix = np.asarray(matrix, dtype=np.int64)
        if not matrix.any():
            return []
        return [header] + [" ".join(str(int(v)) for v in row) for row in matrix]

    lines = [f"sheaf {sheaf.field_prime}", "complex"]
    lines += [" ".join(str(v) for v in simplex) for simplex in sheaf.complex.simplices]
    lines.append(f"m {sheaf.m}")
    for simplex in sheaf.complex.simplices:
        dims = " ".join(str(d) for d in sheaf.stalks[simplex])
        lines.append(f"stalk {token(simplex)} {dims}")
    for face, coface in sheaf.complex.facet_pairs():
        for i in range(sheaf.m + 1):
            lines += block(
                f"res {token(face)} {token(coface)} {i}", sheaf.restriction(face, coface, i)
            )
    for simplex in sheaf.complex.simplices:
        for i in range(sheaf.m):
            lines += block(f"step {token(simplex)} {i}", sheaf.step(simplex, i))
    return "\n".join(lines) + "\n"


def _best_of(repeats: int, action: Callable[[], object]) -> float:
    """Smallest wall time of ``repeats`` calls."""
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        action()
        timings.append(time.perf_counter() - start)
    return min(timings)


class TestAcceptance:
    """Test suite for the randomized acceptance criteria."""

    def test_filtrations_match_the_persistence_algorithm(self) -> None:
        """Test 100 random filtrations over GF(2) bar for bar."""
        rng = np.random.default_rng(7)
        for _ in range(100):
            script = random_filtration(rng, n_vertices=10, n_simplices=40)
            boundaries = tower_presentations(script)

            for k in range(len(boundaries) - 1):
                expected = persistence_algorithm(
                    boundaries[k + 1], boundaries[k], degree_label=k, keep_empty=False
                )
                assert tower_homology(script, [k], keep_empty=False) == expected

    def test_presented_homology_matches_the_oracle(self) -> None:
        """Test 200 random pointwise complexes in three characteristics."""
        rng = np.random.default_rng(11)
        for n in range(200):
            field = PrimeField((2, 3, 5)[n % 3])
            raw = random_raw_complex(rng, m=int(rng.integers(0, 7)), max_dim=6, field=field)

            f0, g0 = complexify_pair(*pres_complex(raw))

            assert pres_hom(f0, g0, degree_label=1, keep_empty=False) == (
                pointwise_homology_barcode(raw, degree=1)
            )

    def test_zigzag_route_matches_order_complex(self) -> None:
        """Test 50 random zigzag sheaves in degrees zero to two."""
        rng = np.random.default_rng(13)
        for _ in range(50):
            sheaf = random_zigzag_sheaf(
                rng, int(rng.integers(2, 11)), m=int(rng.integers(0, 5)), labels=2
            )

            for k in (0, 1):
                assert poset_cohomology(sheaf, k, route="zigzag") == poset_cohomology(
                    sheaf, k, route="order_complex"
                )
            assert poset_cohomology(sheaf, 2, route="order_complex") == Barcode()

    def test_tower_work_grows_at_most_quadratically(self) -> None:
        """Test the fitted exponent of the operation count on doubling ladders."""
        sizes = [2**e for e in range(7, 11)]
        counts = []
        for n in sizes:
            counter = OperationCounter(name="ladder")
            tower_presentations(_ladder(n), counter=counter)
            counts.append(max(counter.entry_updates, 1))

        exponent = np.polyfit(np.log(sizes), np.log(counts), 1)[0]

        assert exponent <= 2.3

    def test_presented_homology_is_at_most_cubic(self) -> None:
        """Test the fitted wall-time exponent of pres_hom on growing complexes."""
        # Arrange
        rng = np.random.default_rng(17)
        pairs = []
        for m in (16, 32, 64, 128):
            raw = random_raw_complex(rng, m=m, max_dim=6, field=PrimeField(2))
            pairs.append(complexify_pair(*pres_complex(raw)))
        pres_hom(*pairs[0], keep_empty=False)
        sizes = [f0.n_cols + f0.n_rows + g0.n_rows for f0, g0 in pairs]

        # Act
        timings = [
            _best_of(3, lambda f0=f0, g0=g0: pres_hom(f0, g0, keep_empty=False))
            for f0, g0 in pairs
        ]

        # Assert
        exponent = np.polyfit(np.log(sizes), np.log(timings), 1)[0]
        assert exponent <= 3.3

    def test_erdos_renyi_sheaf_end_to_end(self) -> None:
        """Test a graph sheaf with about 2e5 pointwise dimensions through the local route."""
        # Arrange
        rng = np.random.default_rng(19)
        m = 95
        sheaf = erdos_renyi_sheaf(rng, n_vertices=100, m=m)
        n_vertices = len(sheaf.complex.skeleton(0))
        n_edges = len(sheaf.complex.skeleton(1))

        # Act
        barcodes: dict[int, Barcode] = {}
        elapsed: dict[int, float] = {}
        for k in (0, 1):
            start = time.perf_counter()
            barcodes[k] = persistent_sheaf_cohomology(sheaf, k, method="local", keep_empty=False)
            elapsed[k] = time.perf_counter() - start

        # Assert
        assert max(elapsed.values()) < 300, elapsed
        assert 150_000 <= sheaf.size() <= 250_000
        assert barcodes[0].betti(m, 0) - barcodes[1].betti(m, 1) == n_vertices - n_edges

    def test_threads_give_the_same_barcode(self, tmp_path: Path, clean_env: None) -> None:
        """Test that the sheaf command prints identical bars with one and eight threads."""
        # Arrange
        rng = np.random.default_rng(23)
        sheaf = erdos_renyi_sheaf(rng, n_vertices=30, m=20)
        path = tmp_path / "graph.sheaf"
        path.write_text(_sheaf_document(sheaf), encoding="utf-8")
        outputs: dict[str, str] = {}
        timings: dict[str, float] = {}

        # Act
        for threads in ("1", "8"):
            stdout, stderr = io.StringIO(), io.StringIO()
            start = time.perf_counter()
            code = run(
                ["sheaf", str(path), "--deg", "1", "--method", "local", "--threads", threads],
                stdout=stdout,
                stderr=stderr,
            )
            timings[threads] = time.perf_counter() - start
            assert code == EXIT_OK, stderr.getvalue()
            outputs[threads] = stdout.getvalue()

        # Assert
        assert outputs["8"] == outputs["1"]
        assert outputs["1"].strip()
        assert timings["8"] <= 2 * timings["1"] + 1.0
