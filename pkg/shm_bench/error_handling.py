"""Error handling and logging setup for the CLI."""

import logging
from functools import wraps

import typer
from pydantic import ValidationError
from rich.logging import RichHandler

from .display import console, print_error
from .models import BenchmarkError


def setup_logging(level: int = logging.INFO) -> None:
    """Route the package logger through rich."""
    logger = logging.getLogger("shm_bench")
    logger.handlers.clear()
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False


def handle_cli_error(func):
    """Decorator to handle common CLI errors."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except typer.Exit:
            raise
        except ValidationError as e:
            print_error(f"Invalid configuration: {e}")
            raise typer.Exit(1)
        except BenchmarkError as e:
            print_error(str(e))
            raise typer.Exit(1)
        except FileNotFoundError as e:
            print_error(str(e))
            raise typer.Exit(1)
        except ValueError as e:
            print_error(str(e))
            raise typer.Exit(1)
        except Exception as e:
            logging.getLogger("shm_bench").debug("Unhandled error", exc_info=True)
            print_error(f"Unexpected error: {e}")
            raise typer.Exit(1)
    return wrapper


def safe_int_conversion(value: str, field_name: str) -> int:
    """Safely convert string to int with descriptive error."""
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"Invalid {field_name}: '{value}' must be a number")


def safe_bool_conversion(value: str) -> bool:
    return value.lower() in ("true", "1", "yes")
