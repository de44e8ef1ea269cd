"""
Emptiness Resource Utilities

Memory-budget bookkeeping for the dense and enumerative routes. The budget
is process-wide; the engine sets it from ``general.memory_budget_mb``.
"""

from typing import Any, Dict, Optional
from loguru import logger

from ..core.errors import BudgetExceededError


DEFAULT_BUDGET_MB = 2048

_budget_bytes = DEFAULT_BUDGET_MB * 1024 * 1024


def set_memory_budget(megabytes: int) -> None:
    """Set the process-wide memory budget in megabytes."""
    global _budget_bytes
    _budget_bytes = int(megabytes) * 1024 * 1024
    logger.debug(f"Memory budget set to {format_bytes(_budget_bytes)}")


def memory_budget() -> int:
    """Current memory budget in bytes."""
    return _budget_bytes


def dense_matrix_bytes(dim: int, itemsize: int = 8) -> int:
    """Bytes needed for a dense ``dim x dim`` array."""
    return int(dim) * int(dim) * int(itemsize)


def check_memory_budget(what: str, required_bytes: int, budget_bytes: Optional[int] = None) -> None:
    """
    Reject a computation whose estimated footprint exceeds the budget.

    Args:
        what: Description used in the error message
        required_bytes: Estimated footprint
        budget_bytes: Budget override (defaults to the process-wide budget)

    Raises:
        BudgetExceededError: If ``required_bytes`` exceeds the budget
    """
    budget = _budget_bytes if budget_bytes is None else budget_bytes
    if required_bytes > budget:
        raise BudgetExceededError(what, required_bytes, budget)

    available = get_memory_info().get("available")
    if available is not None and required_bytes > available:
        logger.warning(
            f"{what} needs {format_bytes(required_bytes)} but only "
            f"{format_bytes(available)} is currently available"
        )


def get_memory_info() -> Dict[str, Any]:
    """
    Get system memory information.

    Returns:
        Dictionary containing memory information, or an ``error`` entry
    """
    try:
        import psutil

        memory = psutil.virtual_memory()
        return {
            "total": memory.total,
            "available": memory.available,
            "used": memory.used,
            "percent_used": memory.percent,
        }
    except ImportError:
        logger.debug("psutil not available, cannot get memory info")
        return {"error": "psutil not available"}
    except Exception as e:
        return {"error": str(e)}


def format_bytes(bytes_value: float) -> str:
    """
    Format bytes into human-readable string.

    Args:
        bytes_value: Number of bytes

    Returns:
        Formatted string
    """
    if bytes_value == 0:
        return "0 B"

    size_names = ["B", "KB", "MB", "GB", "TB", "PB"]
    i = 0
    value = float(bytes_value)
    while value >= 1024 and i < len(size_names) - 1:
        value /= 1024.0
        i += 1

    return f"{value:.1f} {size_names[i]}"
