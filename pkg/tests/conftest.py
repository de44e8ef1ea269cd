"""Shared fixtures for the emptiness test-suite."""

import numpy as np
import pytest
from loguru import logger

from emptiness.lattice import Torus, build_torus
from emptiness.utils.resources import DEFAULT_BUDGET_MB, set_memory_budget


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    """Keep loguru output out of the test report."""
    logger.remove()
    logger.add(lambda message: None, level="WARNING")
    yield


@pytest.fixture(autouse=True)
def reset_memory_budget():
    """The budget is process-wide; runs that lower it must not leak."""
    yield
    set_memory_budget(DEFAULT_BUDGET_MB)


@pytest.fixture
def chain4() -> Torus:
    return build_torus(1, 4)


@pytest.fixture
def chain6() -> Torus:
    return build_torus(1, 6)


@pytest.fixture
def chain8() -> Torus:
    return build_torus(1, 8)


@pytest.fixture
def two_site_edge() -> Torus:
    """A single edge between two sites, outside the torus family."""
    coords = np.array([[0], [1]])
    edges = np.array([[0, 1]])
    return Torus(d=1, n=2, coords=coords, edges=edges)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
