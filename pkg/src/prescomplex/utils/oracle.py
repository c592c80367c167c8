"""Brute-force pointwise verifiers.

Everything here works on dense galois arrays with plain Gaussian
elimination, index by index. It is slow by construction and exists to
check the presentation-based algorithms.
"""

from collections.abc import Sequence
from typing import Any

import numpy as np
import numpy.typing as npt

from ..config.logging import get_logger
from ..core.barcode import INFINITY, Barcode, Interval
from ..core.field import PrimeField
from ..core.graded import IntMatrix, RawComplex, RawModule

logger = get_logger(__name__)


def pointwise_barcode(
    dims: Sequence[int],
    maps: Sequence[npt.ArrayLike],
    field: PrimeField | None = None,
    degree: int = 0,
) -> Barcode:
    """Barcode of a pointwise module by inclusion-exclusion on ranks.

    The multiplicity of ``[i, j)`` is
    ``r(i, j-1) - r(i, j) - r(i-1, j-1) + r(i-1, j)`` where ``r(i, j)`` is the
    rank of the structure map from ``i`` to ``j``; bars alive at the last
    index ``m`` are infinite.

    Args:
        dims: Dimensions at indices ``0 .. m``
        maps: Structure matrices ``dims[i+1] x dims[i]``
        field: Coefficient field
        degree: Degree label of every bar

    Returns:
        Barcode of the module
    """
    module = RawModule.build(dims, maps, field).validate()
    m = module.m
    cache: dict[tuple[int, int], int] = {}

    def rank(i: int, j: int) -> int:
        if i < 0:
            return 0
        if (i, j) not in cache:
            cache[(i, j)] = module.rank(i, j)
        return cache[(i, j)]

    intervals: list[Interval] = []
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            count = rank(i, j - 1) - rank(i, j) - rank(i - 1, j - 1) + rank(i - 1, j)
            intervals.extend([Interval(i, j)] * count)
        count = rank(i, m) - rank(i - 1, m)
        intervals.extend([Interval(i, INFINITY)] * count)
    return Barcode.from_intervals(intervals, degree=degree)


def _kernel(field: PrimeField, matrix: IntMatrix, n: int) -> Any:
    """Columns spanning the kernel of ``matrix`` (``n`` columns in the domain)."""
    gf = field.gf
    if n == 0:
        return gf.Zeros((0, 0))
    if matrix.shape[0] == 0 or not matrix.any():
        return gf.Identity(n)
    return field.array(matrix).null_space().T


def _extend_basis(field: PrimeField, start: Any, candidates: Any, n: int) -> Any:
    """Columns of ``candidates`` that extend the span of ``start`` independently."""
    gf = field.gf
    basis = gf.Zeros((n, 0))
    for j in range(start.shape[1]):
        trial = np.hstack([basis, start[:, j : j + 1]])
        if np.linalg.matrix_rank(trial) > basis.shape[1]:
            basis = trial
    image_rank = basis.shape[1]
    for j in range(candidates.shape[1]):
        trial = np.hstack([basis, candidates[:, j : j + 1]])
        if np.linalg.matrix_rank(trial) > basis.shape[1]:
            basis = trial
    return basis, image_rank


def _coordinates(basis: Any, vectors: Any) -> Any:
    """Solve ``basis @ x = vectors`` for a basis with independent columns."""
    c = basis.shape[1]
    reduced = np.hstack([basis, vectors]).row_reduce()
    return reduced[:c, c:]


def _homology_bases(raw: RawComplex) -> list[tuple[Any, int]]:
    field = raw.field
    bases = []
    for i in range(raw.m + 1):
        n = raw.dims_m[i]
        kernel = _kernel(field, raw.G[i], n)
        image = field.array(raw.F[i]) if n else field.gf.Zeros((0, 0))
        if n == 0:
            bases.append((field.gf.Zeros((0, 0)), 0))
            continue
        if image.shape[1] == 0:
            image = field.gf.Zeros((n, 0))
        bases.append(_extend_basis(field, image, kernel, n))
    return bases


def pointwise_homology_dims(raw: RawComplex) -> list[int]:
    """``dim ker G_i - rank F_i`` at every index."""
    raw.validate()
    field = raw.field
    return [
        raw.dims_m[i] - field.rank(raw.G[i]) - field.rank(raw.F[i])
        for i in range(raw.m + 1)
    ]


def pointwise_homology_barcode(
    raw: RawComplex, degree: int = 0, keep_empty: bool = False
) -> Barcode:
    """Barcode of ``ker G / im F`` computed index by index.

    Homology representatives extend a basis of the image to the kernel;
    induced maps are read off as coordinates of the pushed representatives
    in the next index's extended basis.

    Args:
        raw: Valid pointwise complex
        degree: Degree label of every bar
        keep_empty: Accepted for symmetry with the presentation pipeline;
            the pointwise barcode never has empty bars

    Returns:
        Barcode of the homology module
    """
    raw.validate()
    field = raw.field
    bases = _homology_bases(raw)
    dims = pointwise_homology_dims(raw)
    maps: list[IntMatrix] = []
    for i in range(raw.m):
        basis, image_rank = bases[i]
        target, target_rank = bases[i + 1]
        if dims[i] == 0 or dims[i + 1] == 0:
            maps.append(np.zeros((dims[i + 1], dims[i]), dtype=np.int64))
            continue
        pushed = field.array(raw.M[i]) @ basis[:, image_rank:]
        coordinates = _coordinates(target, pushed)
        maps.append(np.asarray(coordinates[target_rank:, :], dtype=np.int64))
    barcode = pointwise_barcode(dims, maps, field, degree=degree)
    logger.debug("pointwise_homology", degree=degree, dims=dims, bars=len(barcode))
    return barcode if keep_empty else barcode.without_empty()


def random_invertible(n: int, field: PrimeField, rng: np.random.Generator) -> IntMatrix:
    """Uniformly random invertible ``n x n`` matrix by rejection."""
    while True:
        candidate = rng.integers(0, field.p, size=(n, n), dtype=np.int64)
        if field.rank(candidate) == n:
            return candidate
