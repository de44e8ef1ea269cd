"""Poisson loop representation: timelines, loop decomposition and Monte Carlo estimators."""

from .decomposition import (
    LabelingCount,
    LoopDecomposition,
    ParityUnionFind,
    aligned_time_integral,
    count_consistent_labelings,
    count_labelings_total,
    count_open_labelings,
    decompose_loops,
    edge_overlap_intervals,
    segment_spins,
)
from .estimators import (
    ESTIMATORS,
    EfpEstimate,
    estimate_efp_mc,
    estimate_efp_potential,
    estimate_kernel_mc,
    estimate_partition_mc,
    jackknife_ratio,
    potential_log_weights,
)
from .timeline import (
    EventKind,
    EventTimeline,
    build_event_g,
    event_g_pattern,
    rates_for,
    sample_timeline,
    u_from_delta,
)

__all__ = [
    "ESTIMATORS",
    "EfpEstimate",
    "EventKind",
    "EventTimeline",
    "LabelingCount",
    "LoopDecomposition",
    "ParityUnionFind",
    "aligned_time_integral",
    "build_event_g",
    "count_consistent_labelings",
    "count_labelings_total",
    "count_open_labelings",
    "decompose_loops",
    "edge_overlap_intervals",
    "estimate_efp_mc",
    "estimate_efp_potential",
    "estimate_kernel_mc",
    "estimate_partition_mc",
    "event_g_pattern",
    "jackknife_ratio",
    "potential_log_weights",
    "rates_for",
    "sample_timeline",
    "segment_spins",
    "u_from_delta",
]
