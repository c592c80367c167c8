"""Utility modules."""

from prescomplex.utils.concurrency import parallel_map
from prescomplex.utils.monitoring import OperationCounter

__all__ = ["OperationCounter", "parallel_map"]
