"""Parallel map over independent work items."""

from collections.abc import Callable, Iterable
from typing import TypeVar

from joblib import Parallel, cpu_count, delayed

from ..config.logging import get_logger
from ..config.settings import get_settings

T = TypeVar("T")
R = TypeVar("R")

logger = get_logger(__name__)


def parallel_map(
    function: Callable[[T], R],
    items: Iterable[T],
    threads: int | None = None,
) -> list[R]:
    """Apply ``function`` to every item, preserving input order.

    Work items must not share mutable state. Threads are used rather than
    processes because the payloads are small matrices and numpy releases the
    GIL in the heavy parts.

    Args:
        function: Pure function of one work item
        items: Work items
        threads: Worker count; defaults to the configured ``threads``

    Returns:
        Results in the order of ``items``
    """
    inputs = list(items)
    if threads is None:
        threads = get_settings().threads
    if threads <= 1 or len(inputs) <= 1:
        return [function(item) for item in inputs]
    workers = min(cpu_count(), threads, len(inputs))
    logger.debug("parallel_map_started", items=len(inputs), workers=workers)
    results: list[R] = Parallel(n_jobs=workers, backend="threading")(
        delayed(function)(item) for item in inputs
    )
    return results
