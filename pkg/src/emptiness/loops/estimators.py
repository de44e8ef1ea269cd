"""
Emptiness Loop Monte Carlo Estimators

This module estimates the partition function, the emptiness formation
probability and single kernel elements from independent samples of the
Poisson event process.

All weights are handled as natural logarithms with a max shift before
exponentiation; 2^{#loops} overflows a double long before the timelines get
large.
"""

import math
import time as _time
from dataclasses import asdict, dataclass
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.special import logsumexp
from tqdm import tqdm

from ..core.errors import BudgetExceededError, ValidationError
from ..lattice.torus import SpinConfig, Torus
from .decomposition import (
    aligned_time_integral,
    count_consistent_labelings,
    count_labelings_total,
    count_open_labelings,
    decompose_loops,
    edge_overlap_intervals,
)
from .timeline import EventTimeline, sample_timeline, u_from_delta

LN2 = math.log(2.0)
DEFAULT_BATCHES = 32
MAX_ENUMERATED_LOOPS = 16


@dataclass(frozen=True)
class EfpEstimate:
    """A Monte Carlo estimate with its standard error."""
    value: float
    stderr: float
    samples: int
    method: str

    def to_dict(self):
        return asdict(self)


def _generators(seed: Optional[int], chains: int) -> List[np.random.Generator]:
    if chains < 1:
        raise ValidationError(f"chains must be at least 1, got {chains}")
    children = np.random.SeedSequence(seed).spawn(chains)
    return [np.random.default_rng(child) for child in children]


def _timelines(
    torus: Torus,
    u: float,
    beta: float,
    n_samples: int,
    seed: Optional[int],
    chains: int,
    progress: bool,
    label: str
) -> Iterator[EventTimeline]:
    """Timelines chain by chain; chain k draws its share from its own stream."""
    if n_samples < 1:
        raise ValidationError(f"n_samples must be at least 1, got {n_samples}")
    shares = [n_samples // chains + (1 if k < n_samples % chains else 0) for k in range(chains)]
    bar = tqdm(total=n_samples, desc=label, unit="sample", disable=not progress, leave=False)
    try:
        for rng, share in zip(_generators(seed, chains), shares):
            for _ in range(share):
                yield sample_timeline(torus, u, beta, rng)
                bar.update(1)
    finally:
        bar.close()


def jackknife_ratio(log_num: np.ndarray, log_den: np.ndarray, n_batches: int = DEFAULT_BATCHES) -> Tuple[float, float]:
    """
    Ratio of sums sum(exp(log_num)) / sum(exp(log_den)) with a batch jackknife error.

    Args:
        log_num: Per-sample log numerator weights (-inf for zero)
        log_den: Per-sample log denominator weights
        n_batches: Number of contiguous batches

    Returns:
        (ratio, standard error)
    """
    log_num = np.asarray(log_num, dtype=float)
    log_den = np.asarray(log_den, dtype=float)
    shift = float(np.max(log_den))
    num = np.exp(log_num - shift)
    den = np.exp(log_den - shift)
    total_num, total_den = num.sum(), den.sum()
    ratio = float(total_num / total_den)

    batches = min(n_batches, len(num))
    if batches < 2:
        logger.warning("Fewer than two samples; standard error reported as 0")
        return ratio, 0.0
    batch_num = np.array([chunk.sum() for chunk in np.array_split(num, batches)])
    batch_den = np.array([chunk.sum() for chunk in np.array_split(den, batches)])
    with np.errstate(divide="ignore", invalid="ignore"):
        leave_out = (total_num - batch_num) / (total_den - batch_den)
    leave_out = leave_out[np.isfinite(leave_out)]
    if len(leave_out) < 2:
        return ratio, 0.0
    variance = (len(leave_out) - 1) / len(leave_out) * np.sum((leave_out - leave_out.mean()) ** 2)
    return ratio, float(math.sqrt(max(variance, 0.0)))


def _log_weight(count) -> float:
    return -np.inf if count.zero else count.log2 * LN2


def _block_pattern(torus: Torus, l: int) -> Tuple[np.ndarray, SpinConfig]:
    block = torus.block(l)
    return block.sites, SpinConfig.all_up(block.size)


def estimate_efp_mc(
    torus: Torus,
    delta: float,
    beta: float,
    l: int,
    n_samples: int,
    seed: Optional[int] = None,
    n_batches: int = DEFAULT_BATCHES,
    chains: int = 1,
    progress: bool = False
) -> EfpEstimate:
    """
    Ratio estimator of the EFP from the loop representation.

    Numerator weights count labelings with the block all up at time 0,
    denominator weights are 2^{#loops}; both come from the same samples.

    Args:
        torus: Lattice
        delta: Anisotropy, |delta| <= 1
        beta: Inverse temperature
        l: Block side
        n_samples: Number of timelines
        seed: Seed for the chain seed sequence
        n_batches: Jackknife batches
        chains: Independent chains
        progress: Show a tqdm bar

    Returns:
        EfpEstimate with method "mc"
    """
    u = u_from_delta(delta)
    sites, tau = _block_pattern(torus, l)
    started = _time.perf_counter()

    log_num, log_den = [], []
    for timeline in _timelines(torus, u, beta, n_samples, seed, chains, progress, "efp mc"):
        decomp = decompose_loops(timeline)
        log_den.append(_log_weight(count_labelings_total(decomp)))
        log_num.append(_log_weight(count_consistent_labelings(decomp, sites, tau)))

    value, stderr = jackknife_ratio(np.array(log_num), np.array(log_den), n_batches)
    logger.debug(
        f"efp mc: l={l} delta={delta} beta={beta} -> {value:.6g} +- {stderr:.2g} "
        f"({n_samples} samples, {_time.perf_counter() - started:.2f}s)"
    )
    return EfpEstimate(value=value, stderr=stderr, samples=n_samples, method="mc")


def _mean_with_error(log_weights: np.ndarray, log_prefactor: float) -> Tuple[float, float]:
    shift = float(np.max(log_weights))
    weights = np.exp(log_weights - shift)
    scale = math.exp(shift + log_prefactor)
    mean = weights.mean()
    spread = weights.std(ddof=1) / math.sqrt(len(weights)) if len(weights) > 1 else 0.0
    return float(scale * mean), float(scale * spread)


def estimate_partition_mc(
    torus: Torus,
    delta: float,
    beta: float,
    n_samples: int,
    seed: Optional[int] = None,
    chains: int = 1,
    progress: bool = False
) -> EfpEstimate:
    """Estimate Z = e^{beta |E| / 4} E_u[2^{#loops}]."""
    u = u_from_delta(delta)
    log_weights = np.array([
        _log_weight(count_labelings_total(decompose_loops(timeline)))
        for timeline in _timelines(torus, u, beta, n_samples, seed, chains, progress, "partition mc")
    ])
    value, stderr = _mean_with_error(log_weights, beta * torus.num_edges / 4.0)
    return EfpEstimate(value=value, stderr=stderr, samples=n_samples, method="partition")


def estimate_kernel_mc(
    torus: Torus,
    delta: float,
    beta: float,
    sigma: SpinConfig,
    tau: SpinConfig,
    n_samples: int,
    seed: Optional[int] = None,
    chains: int = 1,
    progress: bool = False
) -> EfpEstimate:
    """
    Estimate the kernel element <tau| e^{-beta H} |sigma>.

    Each sample contributes the number of open-arc labelings pinned to
    ``sigma`` at -beta/2 and ``tau`` at +beta/2.

    Args:
        torus: Lattice
        delta: Anisotropy, |delta| <= 1
        beta: Inverse temperature
        sigma: Bottom configuration
        tau: Top configuration
        n_samples: Number of timelines
        seed: Seed

    Returns:
        EfpEstimate with method "kernel"
    """
    u = u_from_delta(delta)
    log_weights = np.array([
        _log_weight(count_open_labelings(timeline, sigma, tau))
        for timeline in _timelines(torus, u, beta, n_samples, seed, chains, progress, "kernel mc")
    ])
    if np.all(np.isneginf(log_weights)):
        return EfpEstimate(value=0.0, stderr=0.0, samples=n_samples, method="kernel")
    value, stderr = _mean_with_error(log_weights, beta * torus.num_edges / 4.0)
    return EfpEstimate(value=value, stderr=stderr, samples=n_samples, method="kernel")


def _all_labelings(count: int) -> np.ndarray:
    if count > MAX_ENUMERATED_LOOPS:
        raise BudgetExceededError(
            f"enumerating 2^{count} loop labelings",
            required_bytes=(1 << count) * count * 8,
        )
    codes = np.arange(1 << count, dtype=np.int64)[:, np.newaxis]
    bits = (codes >> np.arange(count, dtype=np.int64)) & 1
    return 2 * bits - 1


def potential_log_weights(
    timeline: EventTimeline,
    delta: float,
    block_sites: np.ndarray
) -> Tuple[float, float]:
    """
    Log of the summed labeling weights of one pure-overpass timeline.

    A labeling sigma weighs exp(-((1 - delta)/4) * integral of sum_e sigma_i sigma_j dt).

    Returns:
        (log numerator over labelings with the block up at time 0,
         log denominator over all labelings)
    """
    decomp = decompose_loops(timeline)
    labels = _all_labelings(decomp.count)
    exponent = -(1.0 - delta) / 4.0 * aligned_time_integral(decomp, labels, edge_overlap_intervals(decomp))
    log_den = float(logsumexp(exponent))

    if len(block_sites) == 0:
        return log_den, log_den
    segs = np.array([decomp.segment_at(int(site), 0.0) for site in block_sites])
    sign = 1 - 2 * decomp.parity[segs].astype(np.int64)
    block_up = np.all(labels[:, decomp.component[segs]] * sign == 1, axis=1)
    log_num = float(logsumexp(exponent[block_up])) if block_up.any() else -np.inf
    return log_num, log_den


def estimate_efp_potential(
    torus: Torus,
    delta: float,
    beta: float,
    l: int,
    n_samples: int,
    seed: Optional[int] = None,
    n_batches: int = DEFAULT_BATCHES,
    chains: int = 1,
    progress: bool = False
) -> EfpEstimate:
    """
    EFP for any real delta through the Feynman-Kac potential form.

    Timelines come from the delta = 1 process (overpasses only, rate 1/2);
    every labeling is reweighted by the Ising energy integral, so no
    restriction on delta applies.

    Args:
        torus: Lattice
        delta: Anisotropy, any real
        beta: Inverse temperature
        l: Block side
        n_samples: Number of timelines
        seed: Seed

    Returns:
        EfpEstimate with method "potential"
    """
    sites, _ = _block_pattern(torus, l)
    log_num, log_den = [], []
    for timeline in _timelines(torus, 1.0, beta, n_samples, seed, chains, progress, "efp potential"):
        num, den = potential_log_weights(timeline, delta, sites)
        log_num.append(num)
        log_den.append(den)
    value, stderr = jackknife_ratio(np.array(log_num), np.array(log_den), n_batches)
    logger.debug(f"efp potential: l={l} delta={delta} beta={beta} -> {value:.6g} +- {stderr:.2g}")
    return EfpEstimate(value=value, stderr=stderr, samples=n_samples, method="potential")


Estimator = Callable[..., EfpEstimate]

ESTIMATORS = {
    "mc": estimate_efp_mc,
    "potential": estimate_efp_potential,
}
