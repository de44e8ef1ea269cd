"""
Emptiness Logging Configuration

Console logging goes to stderr; CSV and JSON results own stdout. Runs can
also keep rotating log files, and engine operations report a one-line
summary with structured ``extra`` fields (operation, duration, route,
rows, checks).
"""

import sys
import time
import functools
from pathlib import Path
from typing import Any, Dict
from loguru import logger

from .errors import EmptinessError


CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} | {message} | {extra}"


def setup_logger(
    verbose: bool = False,
    log_level: str = "INFO",
    file_logging: bool = False,
    log_dir: str = "logs"
) -> None:
    """
    Replace loguru's default sink with the emptiness sinks.

    Args:
        verbose: Force DEBUG on the console
        log_level: Console level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        file_logging: Also write ``emptiness.log`` (DEBUG) and
            ``emptiness_errors.log`` (ERROR) under ``log_dir``
        log_dir: Directory for the log files
    """
    logger.remove()
    level = "DEBUG" if verbose else log_level
    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level, colorize=True, diagnose=False)
    if not file_logging:
        return

    directory = Path(log_dir)
    directory.mkdir(parents=True, exist_ok=True)
    logger.add(
        directory / "emptiness.log",
        format=FILE_FORMAT,
        level="DEBUG",
        rotation="10 MB",
        retention="30 days",
        compression="zip",
        diagnose=False
    )
    logger.add(
        directory / "emptiness_errors.log",
        format=FILE_FORMAT,
        level="ERROR",
        rotation="5 MB",
        retention="90 days",
        compression="zip",
        backtrace=True,
        diagnose=False
    )
    logger.debug(f"Logging to {directory} (console level {level})")


def log_run(operation: str, duration: float, **metrics: Any) -> None:
    """Log the summary of a finished engine operation with its metrics bound as extras."""
    details = ", ".join(f"{key}={value}" for key, value in metrics.items())
    message = f"{operation} finished in {duration:.3f}s"
    if details:
        message += f" ({details})"
    logger.bind(operation=operation, duration=duration, **metrics).info(message)


def _result_metrics(result: Any) -> Dict[str, Any]:
    """Row and check counts of scan results and verification summaries."""
    metrics: Dict[str, Any] = {}
    rows = getattr(result, "rows", None)
    if isinstance(rows, list):
        metrics["rows"] = len(rows)
    route = getattr(result, "route", None)
    if isinstance(route, str):
        metrics["route"] = route
    total = getattr(result, "total", None)
    if isinstance(total, int):
        metrics["checks"] = total
        metrics["failures"] = getattr(result, "failures", 0)
    return metrics


def log_function_call(func):
    """
    Log start, summary and failure of an engine operation.

    Rejected inputs and exhausted budgets (``EmptinessError``) are logged as
    warnings, anything else as an error; both are re-raised.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        operation = func.__name__
        bound = logger.bind(operation=operation)
        bound.debug(f"{operation} started")
        start_time = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except EmptinessError as e:
            bound.bind(error=type(e).__name__).warning(f"{operation} rejected: {e}")
            raise
        except Exception as e:
            bound.bind(error=type(e).__name__).error(f"{operation} failed: {e}")
            raise
        log_run(operation, time.perf_counter() - start_time, **_result_metrics(result))
        return result

    return wrapper
