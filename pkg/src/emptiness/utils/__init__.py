"""
Emptiness Utilities Package

Memory-budget bookkeeping, console helpers and result emission.
"""

from .reporting import ReportGenerator
from .resources import check_memory_budget, set_memory_budget

__all__ = [
    "ReportGenerator",
    "check_memory_budget",
    "set_memory_budget",
]
