"""Unit tests for settings, logging setup and the command registry."""

import argparse
from typing import Tuple

import pytest
from loguru import logger

from boxcore.models import Box
from core.config import get_config, reload_config
from core.errors import EvaluationError, InputValidationError, LesionFuseError, RecordParseError
from core.logging_config import setup_logging
from core.registry import (
    EXIT_DOMAIN_ERROR,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    CommandRegistry,
    CommandResult,
)


@pytest.mark.unit
class TestConfig:
    """Tests for environment-driven settings."""

    def test_defaults(self):
        config = get_config()
        assert config.fusion.iou_thresh == 0.55
        assert config.evaluation.match_iou == 0.5
        assert config.evaluation.fp_targets == [0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 16.0]
        assert config.threads == 1

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("LESIONFUSE_THREADS", "4")
        monkeypatch.setenv("LESIONFUSE_FUSION__IOU_THRESH", "0.4")
        monkeypatch.setenv("LESIONFUSE_LOGGING__LEVEL", "DEBUG")
        config = reload_config()
        assert config.threads == 4
        assert config.fusion.iou_thresh == 0.4
        assert config.logging.level == "DEBUG"
        assert get_config() is config

    def test_invalid_threads(self, monkeypatch):
        monkeypatch.setenv("LESIONFUSE_THREADS", "0")
        with pytest.raises(ValueError):
            reload_config()

    def test_reload_after_env_restored(self, monkeypatch):
        monkeypatch.setenv("LESIONFUSE_THREADS", "0")
        with pytest.raises(ValueError):
            reload_config()
        monkeypatch.undo()
        assert reload_config().threads >= 1


@pytest.mark.unit
class TestLogging:
    """Tests for setup_logging."""

    def test_file_sink(self, tmp_path):
        log_file = tmp_path / "logs" / "lesionfuse.log"
        setup_logging(level="INFO", log_file=log_file)
        logger.info("fused 3 clusters")
        logger.debug("hidden")
        logger.remove()
        text = log_file.read_text(encoding="utf-8")
        assert "fused 3 clusters" in text
        assert "hidden" not in text


@pytest.mark.unit
class TestErrors:
    """Tests for the exception hierarchy."""

    def test_record_parse_error_location(self):
        err = RecordParseError("bad score", path="dets.jsonl", line=17)
        assert str(err) == "dets.jsonl:17: bad score"
        assert isinstance(err, InputValidationError)
        assert isinstance(err, ValueError)

    def test_line_without_path(self):
        assert str(RecordParseError("bad", line=3)) == "line 3: bad"


def _registry_with(handler) -> Tuple[CommandRegistry, argparse.Namespace]:
    registry = CommandRegistry()
    registry.command("noop", help="test command", configure=lambda p: None)(handler)
    parser = argparse.ArgumentParser()
    registry.add_subparsers(parser)
    args = parser.parse_args(["noop"])
    return registry, args


def _raise(exc):
    def handler(args):
        raise exc

    return handler


@pytest.mark.unit
class TestRegistry:
    """Tests for CommandRegistry dispatch and exit codes."""

    def test_registration(self):
        registry, _ = _registry_with(lambda a: CommandResult(success=True, message="ok"))
        assert registry.names == ["noop"]

    def test_success(self):
        registry, args = _registry_with(lambda a: CommandResult(success=True, message="ok"))
        assert registry.dispatch(args).exit_code == EXIT_OK

    @pytest.mark.parametrize(
        "exc, code",
        [
            (EvaluationError("no annotations"), EXIT_DOMAIN_ERROR),
            (LesionFuseError("other"), EXIT_DOMAIN_ERROR),
            (InputValidationError("bad flag"), EXIT_INPUT_ERROR),
            (RecordParseError("bad line", path="x.jsonl", line=2), EXIT_INPUT_ERROR),
            (FileNotFoundError("missing.jsonl"), EXIT_INPUT_ERROR),
        ],
    )
    def test_exception_exit_codes(self, exc, code):
        registry, args = _registry_with(_raise(exc))
        result = registry.dispatch(args)
        assert result.success is False
        assert result.exit_code == code

    def test_pydantic_error_is_input_error(self):
        def handler(args):
            Box(x1=5, y1=0, x2=1, y2=1)

        registry, args = _registry_with(handler)
        result = registry.dispatch(args)
        assert result.exit_code == EXIT_INPUT_ERROR
        assert result.message.startswith("invalid input:")

    def test_unexpected_errors_propagate(self):
        registry, args = _registry_with(_raise(RuntimeError("bug")))
        with pytest.raises(RuntimeError):
            registry.dispatch(args)
