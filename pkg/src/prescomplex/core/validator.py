"""Structured errors and invariant validators.

Every failure raised by the library derives from :class:`PresentationError`
and names the offending entity (an index, a (row, column) pair, a simplex, an
event time) so callers and the CLI can point at it.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import TYPE_CHECKING, Any

from prescomplex.config.logging import get_logger

if TYPE_CHECKING:
    from prescomplex.core.graded import (
        AnnotatedMatrix,
        RawComplex,
        RawModule,
        RawModuleMorphism,
    )

logger = get_logger(__name__)


class PresentationError(Exception):
    """Base class for all library errors."""

    def __init__(
        self,
        message: str,
        entity: Any = None,
        errors: list[str] | None = None,
    ) -> None:
        """Initialize the error.

        Args:
            message: Error message
            entity: The offending index, pair, simplex or event time
            errors: Individual violations when several were collected
        """
        self.entity = entity
        self.errors = errors or []
        super().__init__(message)


class InvariantViolation(PresentationError):
    """A validity, shape, commutativity or naturality condition failed."""


class AnnotationMismatch(InvariantViolation):
    """Two presentations that must share generators do not."""


class NotAComplexError(InvariantViolation):
    """A composite that must vanish does not."""


class TowerScriptError(InvariantViolation):
    """A tower event refers to missing or dead cells."""


class SizeLimitExceeded(InvariantViolation):
    """An exponential construction would exceed the configured size guard."""


class ParseError(PresentationError):
    """A text document could not be parsed."""

    def __init__(
        self,
        message: str,
        path: str | None = None,
        line: int | None = None,
    ) -> None:
        self.path = path
        self.line = line
        super().__init__(message, entity=line)

    def located(self) -> str:
        """Message prefixed with ``path:line`` where known."""
        where = self.path or ""
        if self.line is not None:
            where = f"{where}:{self.line}" if where else f"line {self.line}"
        return f"{where}: {self}" if where else str(self)


class AnnotatedMatrixValidator:
    """Checks the birth and death rules of annotated matrices.

    A nonzero entry ``(k, j)`` is legal only if the row bar is born no later
    and dies no later than the column bar.
    """

    def __init__(self, strict: bool = True) -> None:
        """Initialize the validator.

        Args:
            strict: If True, also check the death rule; compose results are
                legitimately checked with ``strict=False``
        """
        self.strict = strict
        self.logger = get_logger(f"{__name__}.AnnotatedMatrixValidator")

    def violations(self, matrix: AnnotatedMatrix) -> list[tuple[int, int, str]]:
        found: list[tuple[int, int, str]] = []
        for k, j, _ in matrix.nonzero():
            row, col = matrix.row_ann[k], matrix.col_ann[j]
            if row.birth > col.birth:
                found.append((k, j, f"row {k} {row} born after column {j} {col}"))
            elif self.strict and row.death > col.death:
                found.append((k, j, f"row {k} {row} outlives column {j} {col}"))
        return found

    def validate(self, matrix: AnnotatedMatrix) -> None:
        """Validate an annotated matrix.

        Raises:
            InvariantViolation: Naming the first offending (row, column) pair
        """
        found = self.violations(matrix)
        if found:
            k, j, _ = found[0]
            errors = [message for _, _, message in found]
            raise InvariantViolation(
                f"Invalid annotated matrix: {', '.join(errors[:5])}",
                entity=(k, j),
                errors=errors,
            )
        self.logger.debug(
            "annotated_matrix_validated",
            rows=matrix.n_rows,
            cols=matrix.n_cols,
        )


class RawModuleValidator:
    """Shape and commutativity checks for pointwise data."""

    def __init__(self) -> None:
        self.logger = get_logger(f"{__name__}.RawModuleValidator")

    def validate_module(self, module: RawModule, name: str = "module") -> None:
        """Check that every structure map has shape ``dims[i+1] x dims[i]``.

        Raises:
            InvariantViolation: Naming the first bad index
        """
        if len(module.dims) != module.m + 1:
            raise InvariantViolation(
                f"{name}: expected {module.m + 1} dimensions, got {len(module.dims)}",
                entity=len(module.dims),
            )
        if len(module.maps) != module.m:
            raise InvariantViolation(
                f"{name}: expected {module.m} structure maps, got {len(module.maps)}",
                entity=len(module.maps),
            )
        for i, matrix in enumerate(module.maps):
            expected = (module.dims[i + 1], module.dims[i])
            if matrix.shape != expected:
                raise InvariantViolation(
                    f"{name}: map {i} has shape {matrix.shape}, expected {expected}",
                    entity=i,
                )

    def validate_morphism(self, morphism: RawModuleMorphism, name: str = "morphism") -> None:
        """Check shapes of all maps and the squares ``B_i C_i = C_{i+1} A_i``.

        Raises:
            InvariantViolation: Naming the first bad index
        """
        domain, codomain = morphism.domain(), morphism.codomain()
        if domain.m != codomain.m:
            raise InvariantViolation(
                f"{name}: domain has m={domain.m}, codomain has m={codomain.m}",
                entity=0,
            )
        self.validate_module(domain, f"{name} domain")
        self.validate_module(codomain, f"{name} codomain")
        self._validate_connecting(
            morphism.C, domain.dims, codomain.dims, domain.maps, codomain.maps,
            morphism.field, name,
        )

    def validate_complex(self, raw: RawComplex) -> None:
        """Validate both morphisms of a raw complex and ``g_i f_i = 0``.

        Raises:
            InvariantViolation: Naming the first bad index
        """
        self.validate_morphism(raw.first(), "f")
        self.validate_morphism(raw.second(), "g")
        for i, (f, g) in enumerate(zip(raw.F, raw.G, strict=True)):
            if raw.field.matmul(g, f).any():
                raise InvariantViolation(
                    f"g_{i} f_{i} is not zero", entity=i
                )
        self.logger.debug("raw_complex_validated", m=raw.m)

    def _validate_connecting(
        self,
        maps: Sequence[Any],
        dims_src: Sequence[int],
        dims_dst: Sequence[int],
        src_maps: Sequence[Any],
        dst_maps: Sequence[Any],
        field: Any,
        name: str,
    ) -> None:
        if len(maps) != len(dims_src):
            raise InvariantViolation(
                f"{name}: expected {len(dims_src)} connecting maps, got {len(maps)}",
                entity=len(maps),
            )
        for i, matrix in enumerate(maps):
            expected = (dims_dst[i], dims_src[i])
            if matrix.shape != expected:
                raise InvariantViolation(
                    f"{name}: connecting map {i} has shape {matrix.shape}, expected {expected}",
                    entity=i,
                )
        for i in range(len(src_maps)):
            left = field.matmul(dst_maps[i], maps[i])
            right = field.matmul(maps[i + 1], src_maps[i])
            if not (left == right).all():
                raise InvariantViolation(
                    f"{name}: square at index {i} does not commute", entity=i
                )
