"""Tests for logging configuration."""

import json
import logging

import pytest
import structlog

from prescomplex.config.logging import (
    bind_run_context,
    clear_run_context,
    configure_logging,
    get_logger,
)


class TestLoggingConfiguration:
    """Test suite for logging configuration."""

    def test_configure_logging_json_format(self) -> None:
        """Test logging configuration with JSON format."""
        # Act
        configure_logging(log_level="INFO", log_format="json", service_name="test")

        # Assert
        logger = get_logger("test.module")
        assert logger is not None
        logger.info("presentation_computed", generators=6, relations=3)

    def test_configure_logging_pretty_format(self) -> None:
        """Test logging configuration with pretty format."""
        # Act
        configure_logging(log_level="DEBUG", log_format="pretty", service_name="test")

        # Assert
        logger = get_logger("test.module")
        assert logger is not None
        logger.debug("tower_event_applied", time=3, kind="include")

    def test_configure_logging_invalid_format(self) -> None:
        """Test that invalid log format raises ValueError."""
        # Act & Assert
        with pytest.raises(ValueError, match="log_format must be"):
            configure_logging(log_format="invalid")

    def test_configure_logging_sets_log_level(self) -> None:
        """Test that log level is properly set."""
        # Act
        configure_logging(log_level="WARNING", log_format="json")

        # Assert
        root_logger = logging.getLogger()
        assert root_logger.level == logging.WARNING

    def test_unknown_level_falls_back_to_warning(self) -> None:
        """Test that an unknown level name does not break configuration."""
        # Act
        configure_logging(log_level="CHATTY", log_format="json")

        # Assert
        assert logging.getLogger().level == logging.WARNING

    def test_records_go_to_stderr(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that log records never touch stdout."""
        # Arrange
        configure_logging(log_level="INFO", log_format="json", service_name="svc")
        structlog.contextvars.clear_contextvars()
        structlog.contextvars.bind_contextvars(service="svc")
        logger = get_logger("prescomplex.test")

        # Act
        logger.warning("homology_computed", degree=1, bars=2)
        captured = capsys.readouterr()

        # Assert
        assert captured.out == ""
        record = json.loads(captured.err.strip().splitlines()[-1])
        assert record["event"] == "homology_computed"
        assert record["degree"] == 1
        assert record["service"] == "svc"
        assert record["level"] == "warning"

    def test_get_logger_without_name(self) -> None:
        """Test getting a logger without specifying a name."""
        # Arrange
        configure_logging(log_format="json")

        # Act
        logger = get_logger()

        # Assert
        assert logger is not None

    def test_third_party_loggers_stay_quiet(self) -> None:
        """Test that compiler chatter is held at WARNING even in DEBUG runs."""
        # Act
        configure_logging(log_level="DEBUG", log_format="json")

        # Assert
        assert logging.getLogger("numba").level == logging.WARNING
        assert logging.getLogger().level == logging.DEBUG

    def test_run_context_is_bound_and_cleared(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that bound run context appears on events until cleared."""
        # Arrange
        configure_logging(log_level="INFO", log_format="json")
        logger = get_logger("prescomplex.context")

        # Act
        bind_run_context(command="tower")
        logger.info("tower_event_applied", time=0)
        clear_run_context("command")
        logger.info("tower_event_applied", time=1)
        lines = capsys.readouterr().err.strip().splitlines()

        # Assert
        first, second = json.loads(lines[-2]), json.loads(lines[-1])
        assert first["command"] == "tower"
        assert "command" not in second
