"""
Emptiness - XXZ emptiness formation probability toolkit

Computes the emptiness formation probability of the spin-1/2 XXZ model by
exact diagonalization, Monte Carlo over the Poisson loop representation
and six-vertex transfer matrices, and evaluates and verifies the bounds
on its decay.
"""

__version__ = "0.1.0"
__description__ = "Emptiness formation probability of the XXZ model"

# Core imports
from .core.config import Config
from .core.engine import EmptinessEngine
from .core.logger import setup_logger


def main():
    """Main entry point for the emptiness application."""
    from .main import main as app_main
    return app_main()


__all__ = [
    "__version__",
    "__description__",
    "Config",
    "EmptinessEngine",
    "setup_logger",
    "main",
]
