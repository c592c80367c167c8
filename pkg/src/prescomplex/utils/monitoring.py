"""Operation counting for the reduction-heavy algorithms."""

from dataclasses import dataclass, field
from typing import Any

from ..config.logging import get_logger


@dataclass
class OperationCounter:
    """Counts arithmetic work done by a computation.

    ``entry_updates`` is the number of field multiply-adds performed on
    matrix entries; the column and row counters record how many whole
    column or row additions triggered them.

    Example:
        >>> counter = OperationCounter(name="tower")
        >>> counter.column_addition(entries=3)
        >>> counter.entry_updates
        3
    """

    name: str = "operations"
    column_additions: int = 0
    row_additions: int = 0
    entry_updates: int = 0
    extra: dict[str, int] = field(default_factory=dict)

    def column_addition(self, entries: int) -> None:
        self.column_additions += 1
        self.entry_updates += entries

    def row_addition(self, entries: int) -> None:
        self.row_additions += 1
        self.entry_updates += entries

    def bump(self, key: str, amount: int = 1) -> None:
        """Increment a named auxiliary counter."""
        self.extra[key] = self.extra.get(key, 0) + amount

    def snapshot(self) -> dict[str, Any]:
        return {
            "column_additions": self.column_additions,
            "row_additions": self.row_additions,
            "entry_updates": self.entry_updates,
            **self.extra,
        }

    def log_summary(self, event_name: str = "operations_counted", **kwargs: Any) -> None:
        """Log the counters with structured context.

        Args:
            event_name: Name of the log event
            **kwargs: Additional event data as key-value pairs
        """
        get_logger(f"monitor.{self.name}").info(event_name, **self.snapshot(), **kwargs)
