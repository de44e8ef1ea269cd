"""
Emptiness Bound Formulas

This module evaluates the closed-form bounds used in the upper and lower
EFP estimates: chessboard exponents, the Poisson-tail numerator bound, the
entropy bound on six-vertex windows, partition-function lower bounds and
the boundary-layer volume bound.

Values are natural logarithms unless the name says otherwise. Each
evaluator returning a ``BoundReport`` attaches validity flags for the
hypotheses under which the printed inequality was derived; a report whose
flags are down still carries the plug-in value.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.errors import ValidationError
from ..lattice.torus import Torus, boundary_layer
from ..utils.resources import check_memory_budget, dense_matrix_bytes

LN2 = math.log(2.0)
NUM_BOUND_MIN_L = 24
MAX_WINDOW_COLUMNS = 12


@dataclass
class BoundReport:
    """A bound value (log domain) with its inputs and validity flags."""
    name: str
    inputs: Dict[str, Any]
    value: float
    flags: Dict[str, bool] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.flags.values())

    @property
    def linear(self) -> Optional[float]:
        """exp(value) when it is a normal double, else None."""
        if not math.isfinite(self.value) or abs(self.value) > 700:
            return None
        return math.exp(self.value)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["valid"] = self.valid
        data["linear"] = self.linear
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_probability(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValidationError(f"{name} must lie in (0, 1), got {value}")


def _log2_ceil(ratio: float) -> Tuple[int, bool]:
    """ceil(log2(ratio)) and whether ratio is not an exact power of two."""
    exponent = max(0, math.ceil(math.log2(ratio) - 1e-12))
    return exponent, not math.isclose(2.0 ** exponent, ratio)


def chessboard_exponent(n: int, l: int, d: int) -> int:
    """
    Chessboard exponent K = 2^{d (log2(n/l) + 1)}.

    When n/l is not a power of two the logarithm is rounded up and a
    warning is logged; the resulting inequality is the lossy one.

    Raises:
        ValidationError: If l is not in 1..n/2 or d < 1
    """
    return chessboard_report(n, l, d).inputs["K"]


def chessboard_report(n: int, l: int, d: int) -> BoundReport:
    """``chessboard_exponent`` as a report: value ln K, flag ``power_of_two``."""
    if d < 1:
        raise ValidationError(f"dimension d must be at least 1, got {d}")
    if l < 1 or l > n // 2:
        raise ValidationError(f"block side l={l} must satisfy 1 <= l <= n/2 = {n // 2}")
    exponent, lossy = _log2_ceil(n / l)
    k = 2 ** (d * (exponent + 1))
    if lossy:
        logger.warning(f"n/l = {n}/{l} is not a power of two; using the lossy exponent K = {k}")
    return BoundReport(
        name="chessboard_exponent",
        inputs={"n": n, "l": l, "d": d, "K": k},
        value=math.log(k),
        flags={"power_of_two": not lossy},
    )


def chessboard_exponent_2d(n: int, t: int, l: int, ell: int) -> int:
    """
    Six-vertex tile exponent K = 2^{log2(N/L) + log2(T/ell) + 2}, i.e. 4NT/(L ell)
    for power-of-two ratios; logs are rounded up otherwise.
    """
    if l < 1 or l > n // 2:
        raise ValidationError(f"tile width l={l} must satisfy 1 <= l <= n/2 = {n // 2}")
    if ell < 1 or ell > t // 2:
        raise ValidationError(f"tile height ell={ell} must satisfy 1 <= ell <= t/2 = {t // 2}")
    horizontal, lossy_h = _log2_ceil(n / l)
    vertical, lossy_v = _log2_ceil(t / ell)
    k = 2 ** (horizontal + vertical + 2)
    if lossy_h or lossy_v:
        logger.warning(f"Tile ratios {n}/{l}, {t}/{ell} are not both powers of two; K = {k} is lossy")
    return k


def num_bound(delta: float, d: int, n: int, l: int, delta_t: float) -> BoundReport:
    """
    Poisson-tail bound on the numerator of the time-disseminated EFP.

    log( e^{-(1/64)(1-Delta) d N^d dT}
         + e^{[(1/4)(1-Delta) - (M ln M - M + 1)] d N^d dT} )
    with M = L / (1536 d^2 dT).

    Args:
        delta: Anisotropy, below 1 for the bound to be meaningful
        d: Dimension
        n: Torus side
        l: Block side, at least 24 for the bound to apply
        delta_t: Time slice dT = beta / (2n_slices), positive

    Returns:
        BoundReport with flags ``l_ge_24``, ``m_ge_1`` and ``delta_lt_1``
    """
    if delta_t <= 0:
        raise ValidationError(f"time slice must be positive, got {delta_t}")
    if d < 1 or n < 1 or l < 1:
        raise ValidationError(f"d, n and l must be positive, got d={d}, n={n}, l={l}")
    m = l / (1536.0 * d * d * delta_t)
    scale = d * float(n) ** d * delta_t
    poisson = m * math.log(m) - m + 1.0
    first = -(1.0 - delta) * scale / 64.0
    second = (0.25 * (1.0 - delta) - poisson) * scale
    flags = {"l_ge_24": l >= NUM_BOUND_MIN_L, "m_ge_1": m >= 1.0, "delta_lt_1": delta < 1.0}
    report = BoundReport(
        name="num_bound",
        inputs={"delta": delta, "d": d, "n": n, "l": l, "delta_t": delta_t, "M": m},
        value=float(np.logaddexp(first, second)),
        flags=flags,
    )
    if not report.valid:
        down = ", ".join(key for key, ok in flags.items() if not ok)
        logger.warning(f"num_bound outside its hypotheses ({down}); value is a plug-in only")
    return report


def entropy_bound(epsilon: float, l: int) -> float:
    """-eps ln eps - (1-eps) ln(1-eps) + ln 2 / L."""
    _check_probability("epsilon", epsilon)
    if l < 1:
        raise ValidationError(f"L must be at least 1, got {l}")
    return -epsilon * math.log(epsilon) - (1 - epsilon) * math.log(1 - epsilon) + LN2 / l


def _row_counts(l: int) -> np.ndarray:
    """
    counts[S, N]: number of horizontal rows h_0..h_L completing one open
    vertex row whose south and north black-edge masks are S and N.

    Black edges obey h_{a+1} = h_a + s_a - n_a; h_0 is free, so each entry
    is 0, 1 or 2.
    """
    size = 1 << l
    south = np.arange(size)[:, None]
    north = np.arange(size)[None, :]
    counts = np.zeros((size, size), dtype=np.int64)
    for start in (0, 1):
        h = np.full((size, size), start)
        ok = np.ones((size, size), dtype=bool)
        for a in range(l):
            h = h + ((south >> a) & 1) - ((north >> a) & 1)
            ok &= (h >= 0) & (h <= 1)
        counts += ok
    return counts


def window_count(l: int, ell: int) -> int:
    """
    Number of valid open-boundary configurations on L columns and 2 ell
    vertex rows whose middle row of vertical edges points up.

    Horizontal edges at both ends are free. Counted exactly by a row
    transfer in Python integers.

    Raises:
        ValidationError: If l or ell is below 1, or l exceeds the column cap
    """
    if l < 1 or ell < 1:
        raise ValidationError(f"window needs l >= 1 and ell >= 1, got l={l}, ell={ell}")
    if l > MAX_WINDOW_COLUMNS:
        raise ValidationError(f"window width is capped at {MAX_WINDOW_COLUMNS} columns, got {l}")
    check_memory_budget(f"window row transfer of width {l}", 2 * dense_matrix_bytes(1 << l))

    rows = _row_counts(l).astype(object)
    below = np.zeros(1 << l, dtype=object)
    below[0] = 1
    above = below.copy()
    for _ in range(ell):
        below = rows.dot(below)
        above = rows.T.dot(above)
    count = int(below.sum()) * int(above.sum())
    logger.debug(f"Window {l}x{2 * ell}: {count} configurations")
    return count


def window_log_density(l: int, ell: int) -> float:
    """ln |window| / (L (2 ell + 1)), the left side of the entropy bound."""
    return math.log(window_count(l, ell)) / (l * (2 * ell + 1))


def pf_lower_bound(n: int, r_tile: int, kappa: float) -> float:
    """
    Per-site lower bound on ln Z_{N,T}(kappa, 0) / (NT):
    floor(N / 2R) / N * (2 kappa + ln R).
    """
    if r_tile < 1:
        raise ValidationError(f"tile height R must be at least 1, got {r_tile}")
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    return (n // (2 * r_tile)) / n * (2.0 * kappa + math.log(r_tile))


def pf_lower_bound_eta(n: int, eta: float, kappa: float) -> float:
    """The same bound with eta = 1/(8R): floor(4 eta N)/N * (-2|kappa| - ln eta - 3 ln 2)."""
    if eta <= 0:
        raise ValidationError(f"eta must be positive, got {eta}")
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    return math.floor(4 * eta * n + 1e-12) / n * (-2.0 * abs(kappa) - math.log(eta) - 3 * LN2)


def _tile_hypothesis(epsilon: float, l: int, ell: int) -> None:
    if ell + 1 > epsilon * l:
        logger.warning(f"ell + 1 = {ell + 1} exceeds epsilon * L = {epsilon * l:.3g}; density bound not applicable")


def tile_upper_bound(epsilon: float, kappa: float, l: int, ell: int, n: int, t: int) -> BoundReport:
    """
    Per-site upper bound on the log-probability of the disseminated
    all-up tile event:

        -2 eps ln eps - 2 (1-eps) ln(1-eps) + 4 eps |kappa| + 2 ln2 / L
        + ((2L - 1)/N + (2 ell - 1)/T) (|kappa| + 2 ln 2)
    """
    _check_probability("epsilon", epsilon)
    if min(l, ell, n, t) < 1:
        raise ValidationError(f"l, ell, n and t must be positive, got {l}, {ell}, {n}, {t}")
    _tile_hypothesis(epsilon, l, ell)
    value = (
        -2 * epsilon * math.log(epsilon)
        - 2 * (1 - epsilon) * math.log(1 - epsilon)
        + 4 * epsilon * abs(kappa)
        + 2 * LN2 / l
        + ((2 * l - 1) / n + (2 * ell - 1) / t) * (abs(kappa) + 2 * LN2)
    )
    return BoundReport(
        name="tile_upper_bound",
        inputs={"epsilon": epsilon, "kappa": kappa, "l": l, "ell": ell, "n": n, "t": t},
        value=value,
        flags={"ell_fits": ell + 1 <= epsilon * l},
    )


def combined_upper_bound(epsilon: float, eta: float, kappa: float, l: int) -> float:
    """
    Upper bound on ln <1_A> / (NT) after dividing out the partition-function
    lower bound, in the large-N limit:

        -2 eps ln eps + 2 eta ln eta + 4 (eps + eta) |kappa|
        - 2 (1-eps) ln(1-eps) + 3 eta ln 2 + 2 ln 2 / L
    """
    _check_probability("epsilon", epsilon)
    _check_probability("eta", eta)
    if l < 1:
        raise ValidationError(f"L must be at least 1, got {l}")
    return (
        -2 * epsilon * math.log(epsilon)
        + 2 * eta * math.log(eta)
        + 4 * (epsilon + eta) * abs(kappa)
        - 2 * (1 - epsilon) * math.log(1 - epsilon)
        + 3 * eta * LN2
        + 2 * LN2 / l
    )


def boundary_volume_bound(d: int, n: int, l: int, r: int) -> float:
    """|V_r| <= 6 d r N^d / L."""
    if r < 1:
        raise ValidationError(f"distance r must be at least 1, got {r}")
    if d < 1 or n < 1 or l < 1:
        raise ValidationError(f"d, n and l must be positive, got d={d}, n={n}, l={l}")
    return 6.0 * d * r * float(n) ** d / l


def boundary_volume_exact(torus: Torus, l: int, r: int) -> int:
    """Exact |V_r| for the universal contour of side ``l``."""
    return int(len(boundary_layer(torus, l, r)))
