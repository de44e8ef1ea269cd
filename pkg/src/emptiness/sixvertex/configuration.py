"""
Emptiness Six-Vertex Configurations

This module holds edge-spin configurations of the six-vertex model on the
n x t torus, the ice rule, vertex classification, weights, brute-force
enumeration and the tile reflections.

Indexing: ``h[i, j]`` is the horizontal edge from vertex (i, j) to (i+1, j)
and ``v[i, j]`` the vertical edge from (i, j) to (i, j+1), both periodic. The
vertex (i, j) therefore sees W = h[i-1, j], E = h[i, j], S = v[i, j-1] and
N = v[i, j]. Spin +1 points right/up, -1 is a "black" edge.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.errors import BudgetExceededError, ValidationError
from ..utils.resources import memory_budget

MAX_ENUMERATED_EDGES = 24

# Vertex type by the black (-1) edges among (W, E, S, N).
TYPE_BY_BLACK = {
    (False, False, False, False): 1,
    (True, True, False, False): 2,
    (False, False, True, True): 3,
    (True, True, True, True): 4,
    (True, False, False, True): 5,
    (False, True, True, False): 6,
}
SINK_SOURCE_TYPES = (5, 6)


@dataclass(frozen=True)
class SixVertexConfig:
    """Edge spins on the n x t torus; arrays of shape (n, t) with entries +-1."""
    h: np.ndarray = field(compare=False)
    v: np.ndarray = field(compare=False)

    def __post_init__(self):
        h = np.asarray(self.h)
        v = np.asarray(self.v)
        if h.ndim != 2 or h.shape != v.shape:
            raise ValidationError(f"h and v must share a 2-d shape, got {h.shape} and {v.shape}")
        if not (np.all(np.abs(h) == 1) and np.all(np.abs(v) == 1)):
            raise ValidationError("edge spins must be +1 or -1")
        object.__setattr__(self, "h", h.astype(np.int8))
        object.__setattr__(self, "v", v.astype(np.int8))

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def t(self) -> int:
        return self.h.shape[1]

    @classmethod
    def reference(cls, n: int, t: int) -> "SixVertexConfig":
        """Every spin up/right."""
        return cls(np.ones((n, t), dtype=np.int8), np.ones((n, t), dtype=np.int8))

    def with_vertical_flipped(self, i: int, j: int) -> "SixVertexConfig":
        v = self.v.copy()
        v[i % self.n, j % self.t] *= -1
        return SixVertexConfig(self.h, v)

    def row_magnetization(self, j: int) -> int:
        """Sum of the vertical spins leaving row j upwards."""
        return int(self.v[:, j].sum())

    def key(self) -> Tuple[bytes, bytes]:
        return self.h.tobytes(), self.v.tobytes()

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, SixVertexConfig):
            return NotImplemented
        return self.h.shape == other.h.shape and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "t": self.t, "h_spins": self.h.tolist(), "v_spins": self.v.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SixVertexConfig":
        data = json.loads(text)
        config = cls(np.array(data["h_spins"]), np.array(data["v_spins"]))
        if (config.n, config.t) != (data.get("n", config.n), data.get("t", config.t)):
            raise ValidationError("declared n, t do not match the spin arrays")
        return config


@dataclass
class IceRuleReport:
    valid: bool
    violations: List[Tuple[int, int]]

    @property
    def first_violation(self) -> Optional[Tuple[int, int]]:
        return self.violations[0] if self.violations else None

    def __bool__(self) -> bool:
        return self.valid


def _neighbourhood(config: SixVertexConfig):
    west = np.roll(config.h, 1, axis=0)
    south = np.roll(config.v, 1, axis=1)
    return west, config.h, south, config.v


def validate_config(config: SixVertexConfig, shape: Optional[Tuple[int, int]] = None) -> IceRuleReport:
    """
    Check the ice rule W + S = E + N at every vertex.

    Args:
        config: Configuration
        shape: Expected (n, t), if any

    Returns:
        IceRuleReport listing violating vertices in row-major order
    """
    if shape is not None and (config.n, config.t) != tuple(shape):
        raise ValidationError(f"configuration has shape {(config.n, config.t)}, expected {tuple(shape)}")
    west, east, south, north = _neighbourhood(config)
    bad = (west.astype(int) + south) != (east.astype(int) + north)
    violations = [(int(i), int(j)) for i, j in np.argwhere(bad)]
    return IceRuleReport(valid=not violations, violations=violations)


def vertex_types(config: SixVertexConfig) -> np.ndarray:
    """Type 1..6 of every vertex, shape (n, t)."""
    report = validate_config(config)
    if not report.valid:
        raise ValidationError(f"ice rule violated at vertex {report.first_violation}")
    west, east, south, north = (edge < 0 for edge in _neighbourhood(config))
    types = np.zeros(config.h.shape, dtype=np.int8)
    for black, kind in TYPE_BY_BLACK.items():
        types[(west == black[0]) & (east == black[1]) & (south == black[2]) & (north == black[3])] = kind
    return types


def vertex_type(config: SixVertexConfig, i: int, j: int) -> int:
    """Type 1..6 of vertex (i, j); 5 and 6 are the sink and source."""
    n, t = config.n, config.t
    black = (
        bool(config.h[(i - 1) % n, j % t] < 0),
        bool(config.h[i % n, j % t] < 0),
        bool(config.v[i % n, (j - 1) % t] < 0),
        bool(config.v[i % n, j % t] < 0),
    )
    if black not in TYPE_BY_BLACK:
        raise ValidationError(f"vertex ({i}, {j}) violates the ice rule")
    return TYPE_BY_BLACK[black]


def sink_source_indicator(config: SixVertexConfig) -> np.ndarray:
    """m_ij: 1 where the vertex is a sink or a source."""
    return np.isin(vertex_types(config), SINK_SOURCE_TYPES).astype(np.int8)


def log_weight(config: SixVertexConfig, kappa: float) -> float:
    """kappa times the number of sink and source vertices."""
    return float(kappa * sink_source_indicator(config).sum())


def weight(config: SixVertexConfig, kappa: float) -> float:
    return float(np.exp(log_weight(config, kappa)))


def mask_to_spins(mask: int, n: int) -> np.ndarray:
    """Bit k set -> +1 at position k."""
    return np.array([1 if (mask >> k) & 1 else -1 for k in range(n)], dtype=np.int8)


def spins_to_mask(spins: np.ndarray) -> int:
    return sum(1 << k for k, s in enumerate(np.asarray(spins).tolist()) if s > 0)


def consistent_rows(sigma: int, sigma_next: int, n: int) -> List[int]:
    """
    Horizontal rows tau (bit i = h[i]) joining vertical rows sigma below and
    sigma_next above under the ice rule.

    Where the rows agree tau is constant across the vertex; where they differ
    tau_{i-1} = sigma_next_i and tau_i = sigma_i.
    """
    full = (1 << n) - 1
    differ = sigma ^ sigma_next
    if differ == 0:
        return [0, full]
    start = (differ & -differ).bit_length() - 1
    tau = 0
    current = (sigma >> start) & 1
    if current:
        tau |= 1 << start
    for step in range(1, n + 1):
        i = (start + step) % n
        if (differ >> i) & 1:
            if current != (sigma_next >> i) & 1:
                return []
            current = (sigma >> i) & 1
        if i != start and current:
            tau |= 1 << i
    return [tau]


def enumerate_configs(n: int, t: int) -> List[SixVertexConfig]:
    """
    Every valid configuration on the n x t torus.

    Rows are enumerated with the ice rule pruning each step, so the cost
    tracks the number of configurations rather than 4^{nt}.

    Raises:
        BudgetExceededError: If n * t exceeds the enumeration limit
    """
    if n < 1 or t < 1:
        raise ValidationError(f"n and t must be positive, got {n}, {t}")
    if n * t > MAX_ENUMERATED_EDGES:
        raise BudgetExceededError(
            f"enumerating six-vertex configurations on {n}x{t}",
            required_bytes=(1 << (n * t)) * 2 * n * t,
            budget_bytes=memory_budget(),
        )
    successors: Dict[int, List[Tuple[int, int]]] = {
        sigma: [(nxt, tau) for nxt in range(1 << n) for tau in consistent_rows(sigma, nxt, n)]
        for sigma in range(1 << n)
    }

    configs: List[SixVertexConfig] = []

    def extend(rows: List[int], taus: List[int]):
        if len(rows) == t:
            for nxt, tau in successors[rows[-1]]:
                if nxt == rows[0]:
                    # Vertex row 0 sits between the top row (below, periodically) and row 0.
                    configs.append(assemble_config(n, rows, [tau] + taus))
            return
        for nxt, tau in successors[rows[-1]]:
            extend(rows + [nxt], taus + [tau])

    for first in range(1 << n):
        extend([first], [])
    logger.debug(f"Enumerated {len(configs)} six-vertex configurations on {n}x{t}")
    return configs


def assemble_config(n: int, rows: List[int], taus: List[int]) -> SixVertexConfig:
    """v[:, j] = rows[j]; h[:, j] = taus[j], the row joining rows[j-1] and rows[j]."""
    v = np.stack([mask_to_spins(r, n) for r in rows], axis=1)
    h = np.stack([mask_to_spins(tau, n) for tau in taus], axis=1)
    return SixVertexConfig(h, v)


@dataclass
class RowStructureReport:
    alternation_ok: bool
    window_ok: bool
    violations: List[str]

    @property
    def ok(self) -> bool:
        return self.alternation_ok and self.window_ok


def _alternates(sequence: np.ndarray) -> bool:
    marked = sequence[np.isin(sequence, SINK_SOURCE_TYPES)]
    if marked.size == 0:
        return True
    return bool(np.all(marked != np.roll(marked, 1))) if marked.size > 1 else False


def row_structure_checks(config: SixVertexConfig) -> RowStructureReport:
    """
    Structural checks on a valid configuration.

    Sinks and sources alternate along every row and column, and the number
    of down spins in any cyclic window of vertical edges changes by at most
    one between adjacent rows.

    Raises:
        ValidationError: If the configuration breaks the ice rule
    """
    types = vertex_types(config)
    violations: List[str] = []
    for j in range(config.t):
        if not _alternates(types[:, j]):
            violations.append(f"row {j}: sinks and sources do not alternate")
    for i in range(config.n):
        if not _alternates(types[i, :]):
            violations.append(f"column {i}: sinks and sources do not alternate")
    alternation_ok = not violations

    down = (config.v < 0).astype(np.int64)
    n = config.n
    window_ok = True
    # Cyclic window sums via a doubled cumulative sum.
    doubled = np.concatenate([down, down], axis=0)
    cumulative = np.concatenate([np.zeros((1, config.t), dtype=np.int64), np.cumsum(doubled, axis=0)])
    for length in range(1, n):
        counts = cumulative[length:length + n] - cumulative[:n]
        jumps = np.abs(counts - np.roll(counts, -1, axis=1))
        if np.any(jumps > 1):
            window_ok = False
            start, row = np.argwhere(jumps > 1)[0]
            violations.append(
                f"window of length {length} at column {start}: count jumps between rows {row} and {row + 1}"
            )
    return RowStructureReport(alternation_ok=alternation_ok, window_ok=window_ok, violations=violations)


def reflect_horizontal(config: SixVertexConfig, n_tile: int, index: int) -> SixVertexConfig:
    """
    Move the tile of width ``n_tile`` at columns [0, n_tile) to tile ``index``.

    Even index: translation by n_tile * index. Odd index: translation and a
    mirror in which horizontal spins keep their value and vertical spins flip.
    """
    n = config.n
    if n_tile < 1 or n % n_tile:
        raise ValidationError(f"tile width {n_tile} must divide n={n}")
    shift = n_tile * index
    columns = np.arange(n)
    if index % 2 == 0:
        return SixVertexConfig(np.roll(config.h, shift, axis=0), np.roll(config.v, shift, axis=0))
    h = np.empty_like(config.h)
    v = np.empty_like(config.v)
    h[(shift + n_tile - 2 - columns) % n] = config.h[columns]
    v[(shift + n_tile - 1 - columns) % n] = -config.v[columns]
    return SixVertexConfig(h, v)


def reflect_vertical(config: SixVertexConfig, t_tile: int, index: int) -> SixVertexConfig:
    """Same as :func:`reflect_horizontal` with the two directions exchanged."""
    t = config.t
    if t_tile < 1 or t % t_tile:
        raise ValidationError(f"tile height {t_tile} must divide t={t}")
    shift = t_tile * index
    rows = np.arange(t)
    if index % 2 == 0:
        return SixVertexConfig(np.roll(config.h, shift, axis=1), np.roll(config.v, shift, axis=1))
    h = np.empty_like(config.h)
    v = np.empty_like(config.v)
    v[:, (shift + t_tile - 2 - rows) % t] = config.v[:, rows]
    h[:, (shift + t_tile - 1 - rows) % t] = -config.h[:, rows]
    return SixVertexConfig(h, v)
