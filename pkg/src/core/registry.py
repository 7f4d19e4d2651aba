"""Subcommand registry for the lesionfuse command line.

Command modules register themselves at import time with ``@cli.command(...)``;
``core.cli`` imports them and builds the argparse tree from the registry.
"""

import argparse
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from core.errors import EvaluationError, InputValidationError, LesionFuseError

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_INPUT_ERROR = 2


class CommandResult(BaseModel):
    """Outcome of one subcommand."""

    success: bool = Field(description="Whether the command succeeded")
    message: str = Field(description="Result message")
    exit_code: int = Field(default=EXIT_OK, description="Process exit code")
    data: Optional[Dict[str, Any]] = Field(default=None, description="Additional result data")


Handler = Callable[[argparse.Namespace], CommandResult]
Configure = Callable[[argparse.ArgumentParser], None]


@dataclass
class Command:
    name: str
    help: str
    configure: Configure
    handler: Handler


def format_validation_error(error: ValidationError) -> str:
    """One ``field.path: message`` item per pydantic error."""
    parts = []
    for item in error.errors():
        loc = ".".join(str(p) for p in item.get("loc", ())) or "<root>"
        parts.append(f"{loc}: {item.get('msg', 'invalid')}")
    return "; ".join(parts)


class CommandRegistry:
    """Holds subcommands and runs them with a stable exit-code contract."""

    def __init__(self) -> None:
        self._commands: Dict[str, Command] = {}

    def command(self, name: str, help: str, configure: Configure) -> Callable[[Handler], Handler]:
        def decorator(handler: Handler) -> Handler:
            self._commands[name] = Command(name=name, help=help, configure=configure, handler=handler)
            return handler

        return decorator

    @property
    def names(self) -> List[str]:
        return list(self._commands)

    def add_subparsers(self, parser: argparse.ArgumentParser) -> None:
        sub = parser.add_subparsers(dest="command", metavar="COMMAND")
        sub.required = True
        for command in self._commands.values():
            child = sub.add_parser(command.name, help=command.help, description=command.help)
            command.configure(child)
            child.set_defaults(_handler=command.handler)

    def dispatch(self, args: argparse.Namespace) -> CommandResult:
        """Run the selected handler, mapping exceptions to exit codes.

        0 success, 1 evaluation/domain error, 2 input/parse error.
        """
        handler: Handler = args._handler
        try:
            return handler(args)
        except EvaluationError as e:
            logger.debug(f"{args.command} failed: {e!r}")
            return CommandResult(success=False, message=str(e), exit_code=EXIT_DOMAIN_ERROR)
        except ValidationError as e:
            logger.debug(f"{args.command} rejected input: {e!r}")
            return CommandResult(
                success=False,
                message=f"invalid input: {format_validation_error(e)}",
                exit_code=EXIT_INPUT_ERROR,
            )
        except (InputValidationError, OSError) as e:
            logger.debug(f"{args.command} rejected input: {e!r}")
            return CommandResult(success=False, message=str(e), exit_code=EXIT_INPUT_ERROR)
        except LesionFuseError as e:
            return CommandResult(success=False, message=str(e), exit_code=EXIT_DOMAIN_ERROR)


# Global registry instance
cli = CommandRegistry()
