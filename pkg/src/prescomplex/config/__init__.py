"""Configuration management."""

from prescomplex.config.settings import Settings, get_settings

__all__ = ["Settings", "get_settings"]
