import logging
import sys

import pytest

from commentary_align.core.logging import (
    DEFAULT_DATE_FORMAT,
    DEFAULT_FORMAT,
    DEFAULT_LOG_LEVEL,
    PACKAGE_NAME,
    _config,
    configure_logging,
    get_current_config,
    get_logger,
)


@pytest.fixture(autouse=True)
def reset_logging_status():
    """Reset the package logger and its config around each test."""
    logger = logging.getLogger(PACKAGE_NAME)
    saved_level = logger.level
    saved_handlers = list(logger.handlers)
    saved_config = dict(_config, handlers=list(_config["handlers"]))

    logger.handlers.clear()
    logger.setLevel(logging.NOTSET)
    _config.update(
        configured=False,
        handlers=[],
        level=DEFAULT_LOG_LEVEL,
        format=DEFAULT_FORMAT,
        date_format=DEFAULT_DATE_FORMAT,
        log_file=None,
    )

    yield

    for handler in logger.handlers:
        handler.close()
    logger.handlers[:] = saved_handlers
    logger.setLevel(saved_level)
    _config.clear()
    _config.update(saved_config)


def _console_handlers(logger: logging.Logger) -> list[logging.Handler]:
    return [
        h
        for h in logger.handlers
        if isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)
    ]


class TestGetLogger:
    """get_logger identity and auto-configuration."""

    def test_returns_named_logger(self):
        """The logger carries the requested dotted name."""
        logger = get_logger("commentary_align.realign.realigner")
        assert isinstance(logger, logging.Logger)
        assert logger.name == "commentary_align.realign.realigner"

    def test_package_logger_triggers_auto_config(self):
        """Requesting a logger under the package configures logging."""
        get_logger("commentary_align.coarse.prealign")
        assert get_current_config()["configured"]

    def test_foreign_logger_does_not_configure(self):
        """Loggers outside the package leave the configuration alone."""
        get_logger("some_other_package.module")
        assert get_current_config()["configured"] is False

    def test_same_name_same_instance(self):
        """Repeated requests return the same logger object."""
        assert get_logger("commentary_align.synth") is get_logger("commentary_align.synth")


class TestConfigureLogging:
    """configure_logging options and validation."""

    def test_defaults(self):
        """Without arguments the package defaults apply."""
        configure_logging()
        config = get_current_config()

        assert config["configured"]
        assert config["level"] == DEFAULT_LOG_LEVEL
        assert config["format"] == DEFAULT_FORMAT
        assert config["date_format"] == DEFAULT_DATE_FORMAT
        assert config["log_file"] is None

    @pytest.mark.parametrize("level", ["debug", "Info", "WARNING", "error", "CRITICAL"])
    def test_level_is_case_insensitive(self, level):
        """Level names are normalised to upper case and applied to the package logger."""
        configure_logging(level=level)
        assert get_current_config()["level"] == level.upper()
        assert logging.getLogger(PACKAGE_NAME).level == getattr(logging, level.upper())

    def test_invalid_level_raises(self):
        """Unknown level names are rejected."""
        with pytest.raises(ValueError, match="Invalid log level"):
            configure_logging(level="LOUD")

    def test_console_handler_writes_to_stderr(self):
        """The console handler targets stderr so stdout stays machine-readable."""
        configure_logging()
        handlers = _console_handlers(logging.getLogger(PACKAGE_NAME))
        assert len(handlers) == 1
        assert handlers[0].stream is sys.stderr

    def test_console_false_no_handler(self):
        """console=False creates no stream handler."""
        configure_logging(console=False)
        assert _console_handlers(logging.getLogger(PACKAGE_NAME)) == []

    def test_log_file_creates_nested_file(self, tmp_path):
        """A log file in a missing directory is created and recorded in the config."""
        log_file = tmp_path / "runs" / "align.log"
        configure_logging(log_file=log_file)

        assert log_file.exists()
        assert get_current_config()["log_file"] == str(log_file)
        assert len(logging.getLogger(PACKAGE_NAME).handlers) == 2

    def test_empty_log_file_is_ignored(self):
        """An empty log-file string adds no file handler."""
        configure_logging(log_file="")
        handlers = logging.getLogger(PACKAGE_NAME).handlers
        assert not any(isinstance(h, logging.FileHandler) for h in handlers)

    def test_second_call_without_force_is_ignored(self):
        """Configuration happens once unless forced."""
        configure_logging(level="INFO")
        configure_logging(level="DEBUG")
        assert get_current_config()["level"] == "INFO"

    def test_force_reconfigure_replaces_handlers(self):
        """force_reconfigure swaps level and handlers."""
        configure_logging(level="INFO")
        configure_logging(level="DEBUG", force_reconfigure=True)
        config = get_current_config()
        assert config["level"] == "DEBUG"
        assert config["handlers_count"] == 1

    def test_records_do_not_propagate(self):
        """Package records stay off the root logger."""
        configure_logging()
        assert logging.getLogger(PACKAGE_NAME).propagate is False


class TestLoggingOutput:
    """What actually reaches the handlers."""

    def test_messages_go_to_stderr_not_stdout(self, capsys):
        """Console records land on stderr only."""
        configure_logging()
        get_logger("commentary_align.cli").info("Loaded match synth-0000-000")
        captured = capsys.readouterr()
        assert "Loaded match synth-0000-000" in captured.err
        assert captured.out == ""

    def test_level_filters_records(self, capsys):
        """Records below the configured level are dropped."""
        configure_logging(level="WARNING")
        logger = get_logger("commentary_align.coarse")
        logger.info("Coarse stage moved 3 commentaries")
        logger.warning("LLM prediction failed")
        captured = capsys.readouterr()
        assert "Coarse stage moved" not in captured.err
        assert "LLM prediction failed" in captured.err

    def test_custom_format(self, capsys):
        """The format string is applied to console output."""
        configure_logging(format_string="ALIGN %(levelname)s %(message)s")
        get_logger("commentary_align.test").info("epoch 1")
        assert "ALIGN INFO epoch 1" in capsys.readouterr().err

    def test_file_and_console_both_receive(self, tmp_path, capsys):
        """With a log file, records reach both sinks."""
        log_file = tmp_path / "train.log"
        configure_logging(log_file=log_file)
        get_logger("commentary_align.aligner.training").info("Epoch 3/50 mean loss 2.1")

        assert "Epoch 3/50" in capsys.readouterr().err
        assert "Epoch 3/50" in log_file.read_text(encoding="utf-8")

    def test_exception_traceback_is_logged(self, capsys):
        """logger.exception includes the exception type and message."""
        configure_logging()
        logger = get_logger("commentary_align.test")
        try:
            raise ValueError("timestamps not strictly increasing")
        except ValueError:
            logger.exception("Failed to load match")
        output = capsys.readouterr().err
        assert "Failed to load match" in output
        assert "ValueError" in output
        assert "timestamps not strictly increasing" in output
