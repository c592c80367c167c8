"""Configuration management."""

from functools import lru_cache
from typing import Literal

import galois
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI settings.

    Every value can be overridden through a ``PRESCOMPLEX_``-prefixed
    environment variable or a ``.env`` file. Explicit function arguments and
    CLI flags take precedence over these defaults.
    """

    # Arithmetic
    field_prime: int = 2

    # Barcode output
    keep_empty: bool = False

    # Sheaf pipeline
    threads: int = 1
    sheaf_method: Literal["global", "local"] = "local"

    # Poset reduction
    order_complex_limit: int = 1_000_000

    # Tower debugging
    validate_events: bool = False

    # Logging Configuration
    log_level: str = "WARNING"
    log_format: str = "json"  # "json" for machines, "pretty" for terminals
    service_name: str = "prescomplex"

    # Pydantic V2 configuration
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="PRESCOMPLEX_",
        case_sensitive=False,
    )

    @field_validator("field_prime")
    @classmethod
    def _check_prime(cls, value: int) -> int:
        if value < 2 or not galois.is_prime(value):
            raise ValueError(f"field_prime must be a prime, got {value}")
        return value

    @field_validator("threads", "order_complex_limit")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"must be at least 1, got {value}")
        return value

    @field_validator("log_format")
    @classmethod
    def _check_log_format(cls, value: str) -> str:
        if value not in ("json", "pretty"):
            raise ValueError(f"log_format must be 'json' or 'pretty', got: {value}")
        return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings, read once from the environment.

    Returns:
        Cached Settings instance
    """
    return Settings()
