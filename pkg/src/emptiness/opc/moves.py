"""
Emptiness Plaquette Moves

Height function, flippable plaquettes and the + / - moves between them,
the highest configuration for a fixed boundary, the blockade check on it
and the search for long aligned runs of vertical edges.

Plaquette (a, b), 0 <= a <= L-2 and 0 <= b <= R-2, is the unit square with
lower-left vertex (a, b): bottom h[a+1, b], top h[a+1, b+1], left v[a, b+1]
and right v[a+1, b+1]. None of these is a boundary edge.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from tqdm import tqdm

from ..core.errors import ConvergenceError, ValidationError
from ..sixvertex.sampling import sample_configs
from .paths import OscPathConfig, require_valid_opc, subrectangle

Plaquette = Tuple[int, int]
C_MINUS = "C-"
C_PLUS = "C+"


@dataclass(frozen=True, order=True)
class HeightRecord:
    value: int

    def __int__(self) -> int:
        return self.value


def height(x: OscPathConfig) -> HeightRecord:
    """
    Number of (path, vertex) pairs with the vertex strictly lower right of
    the black path.

    A path entering vertex column a through its west edge in row b leaves b
    vertices of that column below it; a path that left through the top in
    column a' has every vertex of the columns east of a' below it.
    """
    rows = np.arange(x.height)
    entering = int((x.black_h[:-1] * rows).sum())
    exits = np.flatnonzero(x.black_v[:, -1])
    passed = int(x.height * (x.width - 1 - exits).sum())
    return HeightRecord(entering + passed)


def _corner_masks(x: OscPathConfig) -> Tuple[np.ndarray, np.ndarray]:
    bottom = x.black_h[1:-1, :-1]
    top = x.black_h[1:-1, 1:]
    left = x.black_v[:-1, 1:-1]
    right = x.black_v[1:, 1:-1]
    minus = bottom & right & ~left & ~top
    plus = left & top & ~bottom & ~right
    return minus, plus


def flippable_plaquettes(x: OscPathConfig) -> List[Tuple[Plaquette, str]]:
    """All C- and C+ plaquettes, sorted by row then column."""
    minus, plus = _corner_masks(x)
    found = [((int(a), int(b)), C_MINUS) for a, b in np.argwhere(minus)]
    found += [((int(a), int(b)), C_PLUS) for a, b in np.argwhere(plus)]
    return sorted(found, key=lambda item: (item[0][1], item[0][0]))


def plaquette_type(x: OscPathConfig, plaquette: Plaquette) -> Optional[str]:
    a, b = plaquette
    if not (0 <= a <= x.width - 2 and 0 <= b <= x.height - 2):
        raise ValidationError(f"plaquette {plaquette} is not inside the {x.width}x{x.height} rectangle")
    bottom, top = x.black_h[a + 1, b], x.black_h[a + 1, b + 1]
    left, right = x.black_v[a, b + 1], x.black_v[a + 1, b + 1]
    if bottom and right and not (left or top):
        return C_MINUS
    if left and top and not (bottom or right):
        return C_PLUS
    return None


def _flip(h: np.ndarray, v: np.ndarray, a: int, b: int) -> None:
    h[a + 1, b] ^= True
    h[a + 1, b + 1] ^= True
    v[a, b + 1] ^= True
    v[a + 1, b + 1] ^= True


def apply_move(x: OscPathConfig, plaquette: Plaquette, direction: str) -> OscPathConfig:
    """
    Turn a C- plaquette into C+ (``"+"``) or back (``"-"``).

    Raises:
        ValidationError: If the plaquette does not have the matching type
    """
    if direction not in ("+", "-"):
        raise ValidationError(f"direction must be '+' or '-', got {direction!r}")
    needed = C_MINUS if direction == "+" else C_PLUS
    found = plaquette_type(x, plaquette)
    if found != needed:
        raise ValidationError(f"{direction} move needs a {needed} plaquette at {plaquette}, found {found or 'none'}")
    h, v = x.black_h.copy(), x.black_v.copy()
    _flip(h, v, *plaquette)
    return x.with_edges(h, v)


def highest_opc(x: OscPathConfig, max_moves: Optional[int] = None) -> OscPathConfig:
    """
    Apply + moves until no C- plaquette is left.

    Plaquettes are scanned row by row, repeatedly, until a full scan makes no
    move; the fixpoint does not depend on the order.

    Args:
        x: Valid configuration
        max_moves: Cap on the number of moves, default (L * R)^2

    Returns:
        The highest configuration with the boundary of ``x``

    Raises:
        ConvergenceError: If the cap is reached
    """
    require_valid_opc(x)
    h, v = x.black_h.copy(), x.black_v.copy()
    width, height_ = x.width, x.height
    cap = (width * height_) ** 2 if max_moves is None else max_moves
    moves, sweeps, changed = 0, 0, True
    while changed:
        changed = False
        sweeps += 1
        for b in range(height_ - 1):
            for a in range(width - 1):
                if h[a + 1, b] and v[a + 1, b + 1] and not v[a, b + 1] and not h[a + 1, b + 1]:
                    _flip(h, v, a, b)
                    moves += 1
                    changed = True
                    if moves > cap:
                        raise ConvergenceError(f"highest_opc exceeded {cap} moves on a {width}x{height_} rectangle")
    logger.debug(f"Highest configuration after {moves} moves in {sweeps} sweeps")
    return x.with_edges(h, v)


def raise_randomly(x: OscPathConfig, rng: np.random.Generator) -> Tuple[OscPathConfig, List[int]]:
    """
    + moves on uniformly chosen C- plaquettes until none is left.

    Returns:
        The end configuration and the height after every move, starting
        with the height of ``x``
    """
    require_valid_opc(x)
    heights = [height(x).value]
    while True:
        minus = [p for p, kind in flippable_plaquettes(x) if kind == C_MINUS]
        if not minus:
            return x, heights
        x = apply_move(x, minus[int(rng.integers(len(minus)))], "+")
        heights.append(height(x).value)


@dataclass
class BlockadeReport:
    checked: int
    violations: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def blockade_check(x_max: OscPathConfig) -> BlockadeReport:
    """
    At every vertex (a, b) with a >= 1, b <= R-2 and black west and north
    edges (types 4 and 5), require that all vertices west of it in its row,
    or all vertices above it in its column, are of type 4.

    Only claimed for highest configurations; violations are listed.
    """
    types = x_max.vertex_types()
    checked, violations = 0, []
    for a in range(1, x_max.width):
        for b in range(x_max.height - 1):
            if types[a, b] not in (4, 5):
                continue
            checked += 1
            west = np.all(types[:a, b] == 4)
            above = np.all(types[a, b + 1:] == 4)
            if not (west or above):
                violations.append((a, b))
    if violations:
        logger.warning(f"Blockade check failed at {len(violations)} of {checked} vertices")
    return BlockadeReport(checked, violations)


def aligned_run_detector(x_max: OscPathConfig, l: int) -> Optional[Tuple[int, int]]:
    """
    First row of vertical edges, from the bottom, holding ``l`` consecutive
    edges of one colour.

    Returns:
        (row, start column) or None; None whenever l exceeds the width
    """
    if l < 1:
        raise ValidationError(f"run length must be positive, got {l}")
    if l > x_max.width:
        return None
    windows = np.lib.stride_tricks.sliding_window_view(x_max.black_v, l, axis=0)
    aligned = windows.all(axis=-1) | (~windows).all(axis=-1)
    hits = np.argwhere(aligned.T)
    if not len(hits):
        return None
    row, start = hits[0]
    return int(row), int(start)


@dataclass
class AlignedRunReport:
    l: int
    rho: int
    kappa: float
    samples: int
    hits: int
    m2: int = 0

    @property
    def rate(self) -> float:
        return self.hits / self.samples if self.samples else 0.0


def aligned_run_rate(
    l: int,
    rho: int,
    kappa: float,
    n_samples: int,
    seed: Optional[int] = None,
    progress: bool = False,
    m2: int = 0
) -> AlignedRunReport:
    """
    Fraction of six-vertex torus samples whose boundary on Gamma_{2L,R},
    R = rho * L, yields a highest configuration with an aligned run of L.

    Samples are drawn from the torus Gibbs state restricted to one row
    magnetization sector. The six-vertex weights conserve the number of up
    arrows per row, so ``m2`` picks the sector (twice the row magnetization,
    0 for the half-filled ground-state sector) and the rate is conditional
    on it.

    Args:
        l: Run length; the sampled torus is max(2L, 4) columns wide
        rho: Height in units of L
        kappa: Weight parameter
        n_samples: Number of sampled configurations
        seed: Seed
        progress: Show a tqdm bar
        m2: Row magnetization sector, same parity as the column count

    Returns:
        AlignedRunReport
    """
    if rho < 1:
        raise ValidationError(f"rho must be at least 1, got {rho}")
    width, height_ = 2 * l, rho * l
    columns = max(width, 4)
    if abs(m2) > columns or (columns - m2) % 2:
        raise ValidationError(f"m2={m2} is not a magnetization sector of {columns} columns")
    configs = sample_configs(columns, height_, kappa, m2, n_samples, seed=seed)
    hits = 0
    for config in tqdm(configs, desc="aligned runs", disable=not progress, leave=False):
        x_max = highest_opc(subrectangle(config, 0, 0, width, height_))
        hits += aligned_run_detector(x_max, l) is not None
    report = AlignedRunReport(l, rho, kappa, n_samples, hits, m2)
    logger.info(f"Aligned runs of {l} on {width}x{height_}, m2={m2}: {hits}/{n_samples} (rate {report.rate:.3f})")
    return report


def random_fixture(
    width: int,
    height: int,
    rng: np.random.Generator,
    moves: Optional[int] = None
) -> OscPathConfig:
    """
    Random valid configuration on Gamma_{L,R}.

    Left and bottom boundary edges are drawn uniformly; vertices are then
    filled row by row, the outgoing edges chosen uniformly among those the
    ice rule allows, and the result is shuffled by ``moves`` random
    plaquette moves (default L * R).
    """
    if width < 1 or height < 1:
        raise ValidationError(f"rectangle must be at least 1x1, got {width}x{height}")
    h = np.zeros((width + 1, height), dtype=bool)
    v = np.zeros((width, height + 1), dtype=bool)
    h[0] = rng.random(height) < 0.5
    v[:, 0] = rng.random(width) < 0.5
    for b in range(height):
        for a in range(width):
            incoming = int(h[a, b]) + int(v[a, b])
            if incoming == 1:
                east = bool(rng.random() < 0.5)
                h[a + 1, b], v[a, b + 1] = east, not east
            else:
                h[a + 1, b] = v[a, b + 1] = incoming == 2
    x = OscPathConfig(h, v)

    for _ in range(width * height if moves is None else moves):
        options = flippable_plaquettes(x)
        if not options:
            break
        plaquette, kind = options[int(rng.integers(len(options)))]
        x = apply_move(x, plaquette, "+" if kind == C_MINUS else "-")
    return x
