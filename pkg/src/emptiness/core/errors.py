"""
Emptiness Error Types

Exception hierarchy shared by the numerical modules and the CLI. Each type
also derives from the closest builtin so plain ``except ValueError`` keeps
working for library callers.
"""

from typing import Optional


class EmptinessError(Exception):
    """Base class for all errors raised by the emptiness package."""


class ValidationError(EmptinessError, ValueError):
    """A precondition on the inputs of an operation does not hold."""


class BudgetExceededError(EmptinessError, MemoryError):
    """
    A dense or enumerative computation would exceed the memory budget.

    Args:
        what: Short description of the object that would be built
        required_bytes: Estimated bytes needed
        budget_bytes: Configured budget in bytes
    """

    def __init__(self, what: str, required_bytes: int, budget_bytes: Optional[int] = None):
        # resources imports this module
        from ..utils.resources import format_bytes

        self.what = what
        self.required_bytes = int(required_bytes)
        self.budget_bytes = budget_bytes
        message = f"{what} needs about {format_bytes(self.required_bytes)}"
        if budget_bytes is not None:
            message += f" but the budget is {format_bytes(budget_bytes)}"
        message += "; reduce n/d or raise general.memory_budget_mb"
        super().__init__(message)


class ConvergenceError(EmptinessError, RuntimeError):
    """An iterative method hit its iteration cap."""


class CheckFailure(EmptinessError):
    """One or more verification checks failed."""

    def __init__(self, failures: int, total: int):
        self.failures = failures
        self.total = total
        super().__init__(f"{failures} of {total} checks failed")

