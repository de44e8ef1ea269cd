"""
Emptiness Loop Decomposition

This module cuts every site's time line at the events touching it into
vertical segments, glues segments with a parity union-find according to the
labeling rules and reads off loops and labeling counts.

Labeling rules, with "below" the segment ending at the event and "above" the
segment starting there:

- overpass on {i, j}: sigma_i above = sigma_j below, sigma_j above = sigma_i below
- cul-de-sac on {i, j}: sigma_i below = -sigma_j below, sigma_i above = -sigma_j above

Every connected component of the constraint graph is one loop, so a
consistent periodic timeline carries exactly 2^{#loops} labelings.
"""

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ValidationError
from ..lattice.torus import SpinConfig
from .timeline import EventKind, EventTimeline


class ParityUnionFind:
    """Union-find that also tracks the label parity of each node to its root."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.parity = [0] * size
        self.rank = [0] * size
        self.consistent = True

    def find(self, node: int) -> Tuple[int, int]:
        path = []
        while self.parent[node] != node:
            path.append(node)
            node = self.parent[node]
        root = node
        # Compress, accumulating parity from the root down.
        for child in reversed(path):
            parent = self.parent[child]
            if parent != root:
                self.parity[child] ^= self.parity[parent]
            self.parent[child] = root
        return root, (self.parity[path[0]] if path else 0)

    def union(self, a: int, b: int, parity: int) -> bool:
        """Impose label[a] * label[b] = (-1)^parity; False on contradiction."""
        root_a, par_a = self.find(a)
        root_b, par_b = self.find(b)
        if root_a == root_b:
            if par_a ^ par_b != parity:
                self.consistent = False
                return False
            return True
        if self.rank[root_a] < self.rank[root_b]:
            root_a, root_b = root_b, root_a
        self.parent[root_b] = root_a
        self.parity[root_b] = par_a ^ par_b ^ parity
        if self.rank[root_a] == self.rank[root_b]:
            self.rank[root_a] += 1
        return True


class LabelingCount(NamedTuple):
    """Labeling count 2^log2, or zero when ``zero`` is set."""
    zero: bool
    log2: int

    @property
    def value(self) -> int:
        return 0 if self.zero else 1 << self.log2

    def __bool__(self) -> bool:
        return not self.zero


@dataclass
class LoopDecomposition:
    """
    Segments of the space-time graph grouped into loops.

    ``segments[s]`` is (site, t_start, t_end); ``component[s]`` the loop
    index and ``parity[s]`` the label parity relative to the loop's
    reference segment. ``consistent`` is False when the constraints
    contradict each other; ``count`` is the number of loops either way.
    """
    timeline: EventTimeline
    periodic: bool
    segments: List[Tuple[int, float, float]] = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    component: np.ndarray = field(repr=False)
    parity: np.ndarray = field(repr=False)
    constraints: List[Tuple[int, int, int]] = field(repr=False)
    count: int
    consistent: bool

    @property
    def n_sites(self) -> int:
        return self.timeline.n_sites

    def first_segment(self, site: int) -> int:
        return int(self.offsets[site])

    def last_segment(self, site: int) -> int:
        return int(self.offsets[site + 1] - 1)

    def segment_at(self, site: int, time: float) -> int:
        """Segment of ``site`` with t_start <= time < t_end."""
        lo, hi = self.first_segment(site), self.last_segment(site)
        for seg in range(lo, hi + 1):
            if self.segments[seg][1] <= time < self.segments[seg][2]:
                return seg
        return hi

    @property
    def loops(self) -> List[List[Tuple[int, float, float]]]:
        """Segments of each loop, ordered by (site, t_start)."""
        groups: Dict[int, List[Tuple[int, float, float]]] = {}
        for seg, comp in enumerate(self.component):
            groups.setdefault(int(comp), []).append(self.segments[seg])
        return [sorted(groups[c]) for c in sorted(groups)]

    def block_crossings(self, sites: Sequence[int], time: float = 0.0) -> List[List[Tuple[int, int]]]:
        """Per loop, the (site, parity) pairs where it meets ``sites`` x {time}."""
        crossings: Dict[int, List[Tuple[int, int]]] = {}
        for site in sites:
            seg = self.segment_at(int(site), time)
            crossings.setdefault(int(self.component[seg]), []).append((int(site), int(self.parity[seg])))
        return [crossings[c] for c in sorted(crossings)]

    def total_vertical_length(self) -> float:
        return float(sum(end - start for _, start, end in self.segments))


def _layout(timeline: EventTimeline):
    """Segment ids and the (a, b, parity) constraints generated by events."""
    n_sites = timeline.n_sites
    edges = timeline.edges
    ends = edges[timeline.edge] if timeline.num_events else np.zeros((0, 2), dtype=np.int64)
    per_site = np.bincount(ends.ravel(), minlength=n_sites)
    offsets = np.concatenate([[0], np.cumsum(per_site + 1)])

    half = timeline.beta / 2.0
    cuts: List[List[float]] = [[-half] for _ in range(n_sites)]
    position = [0] * n_sites
    constraints = []
    for (i, j), time, kind in zip(ends.tolist(), timeline.time.tolist(), timeline.kind.tolist()):
        below_i = int(offsets[i]) + position[i]
        below_j = int(offsets[j]) + position[j]
        above_i, above_j = below_i + 1, below_j + 1
        position[i] += 1
        position[j] += 1
        cuts[i].append(time)
        cuts[j].append(time)
        if kind == EventKind.OVERPASS:
            constraints += [(above_i, below_j, 0), (above_j, below_i, 0)]
        else:
            constraints += [(below_i, below_j, 1), (above_i, above_j, 1)]

    segments = []
    for site in range(n_sites):
        bounds = cuts[site] + [half]
        segments += [(site, bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)]
    return segments, offsets, constraints


def _solve(
    n_segments: int,
    constraints: List[Tuple[int, int, int]],
    pins: Sequence[Tuple[int, int]] = ()
) -> Tuple[ParityUnionFind, bool]:
    """Run the union-find; ``pins`` are (segment, parity to the +1 ground node)."""
    ground = n_segments
    uf = ParityUnionFind(n_segments + 1)
    for a, b, parity in constraints:
        uf.union(a, b, parity)
    for seg, parity in pins:
        uf.union(seg, ground, parity)
    return uf, uf.consistent


def _periodic_constraints(offsets: np.ndarray, n_sites: int) -> List[Tuple[int, int, int]]:
    return [(int(offsets[s]), int(offsets[s + 1] - 1), 0) for s in range(n_sites)]


def decompose_loops(timeline: EventTimeline, periodic: bool = True) -> LoopDecomposition:
    """
    Decompose a timeline into loops.

    Args:
        timeline: Event timeline
        periodic: Glue time -beta/2 to beta/2 (the trace); False leaves open arcs

    Returns:
        LoopDecomposition
    """
    segments, offsets, constraints = _layout(timeline)
    if periodic:
        constraints = constraints + _periodic_constraints(offsets, timeline.n_sites)
    uf, consistent = _solve(len(segments), constraints)

    roots = []
    parity = np.zeros(len(segments), dtype=np.int8)
    for seg in range(len(segments)):
        root, par = uf.find(seg)
        roots.append(root)
        parity[seg] = par
    _, component = np.unique(np.asarray(roots), return_inverse=True)
    return LoopDecomposition(
        timeline=timeline,
        periodic=periodic,
        segments=segments,
        offsets=offsets,
        component=component.astype(np.int64),
        parity=parity,
        constraints=constraints,
        count=int(component.max()) + 1 if len(component) else 0,
        consistent=consistent,
    )


def _pin_parity(up: bool) -> int:
    return 0 if up else 1


def count_consistent_labelings(
    decomp: LoopDecomposition,
    block_sites: Sequence[int],
    tau: SpinConfig,
    time: float = 0.0
) -> LabelingCount:
    """
    Number of periodic labelings with sigma_i(time) = tau_i on the block.

    Args:
        decomp: Periodic decomposition
        block_sites: Sites of the block, in the order of ``tau``
        tau: Block pattern, bit k for ``block_sites[k]``

    Returns:
        LabelingCount, zero if a loop receives contradictory signs
    """
    if not decomp.periodic:
        raise ValidationError("block labeling counts need a periodic decomposition")
    if tau.n_sites != len(block_sites):
        raise ValidationError(f"tau has {tau.n_sites} sites but the block has {len(block_sites)}")
    if not decomp.consistent:
        return LabelingCount(True, 0)

    fixed: Dict[int, int] = {}
    for k, site in enumerate(block_sites):
        seg = decomp.segment_at(int(site), time)
        comp = int(decomp.component[seg])
        wanted = _pin_parity(tau.is_up(k)) ^ int(decomp.parity[seg])
        if fixed.setdefault(comp, wanted) != wanted:
            return LabelingCount(True, 0)
    return LabelingCount(False, decomp.count - len(fixed))


def count_labelings_total(decomp: LoopDecomposition) -> LabelingCount:
    """All labelings of the decomposition: 2^{count}, or zero if inconsistent."""
    if not decomp.consistent:
        return LabelingCount(True, 0)
    return LabelingCount(False, decomp.count)


def count_open_labelings(timeline: EventTimeline, sigma: SpinConfig, tau: SpinConfig) -> LabelingCount:
    """
    Labelings of the open arcs with sigma at -beta/2 and tau at +beta/2.

    Args:
        timeline: Event timeline
        sigma: Configuration at the bottom
        tau: Configuration at the top

    Returns:
        LabelingCount
    """
    n_sites = timeline.n_sites
    if sigma.n_sites != n_sites or tau.n_sites != n_sites:
        raise ValidationError("sigma and tau must cover every site")
    segments, offsets, constraints = _layout(timeline)
    pins: List[Tuple[int, int]] = []
    for site in range(n_sites):
        pins.append((int(offsets[site]), _pin_parity(sigma.is_up(site))))
        pins.append((int(offsets[site + 1] - 1), _pin_parity(tau.is_up(site))))
    uf, consistent = _solve(len(segments), constraints, pins)
    if not consistent:
        return LabelingCount(True, 0)
    roots = {uf.find(seg)[0] for seg in range(len(segments) + 1)}
    # The ground node's component carries no freedom.
    return LabelingCount(False, len(roots) - 1)


def segment_spins(decomp: LoopDecomposition, loop_labels: np.ndarray) -> np.ndarray:
    """
    Spin of every segment for a batch of loop labelings.

    Args:
        decomp: Decomposition
        loop_labels: Array (batch, count) of +-1 loop labels

    Returns:
        Array (batch, n_segments) of +-1
    """
    sign = 1 - 2 * decomp.parity.astype(np.int64)
    return loop_labels[:, decomp.component] * sign[np.newaxis, :]


def edge_overlap_intervals(decomp: LoopDecomposition) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Constancy intervals of every edge.

    Returns:
        (segment of endpoint i, segment of endpoint j, duration), one entry
        per maximal interval on which both endpoint spins are constant
    """
    timeline = decomp.timeline
    half = timeline.beta / 2.0
    starts = [np.array([seg[1] for seg in decomp.segments[decomp.first_segment(s):decomp.last_segment(s) + 1]])
              for s in range(decomp.n_sites)]
    seg_a, seg_b, duration = [], [], []
    for i, j in timeline.edges.tolist():
        cuts = np.unique(np.concatenate([starts[i], starts[j], [half]]))
        left, right = cuts[:-1], cuts[1:]
        seg_a.append(decomp.offsets[i] + np.searchsorted(starts[i], left, side="right") - 1)
        seg_b.append(decomp.offsets[j] + np.searchsorted(starts[j], left, side="right") - 1)
        duration.append(right - left)
    return np.concatenate(seg_a), np.concatenate(seg_b), np.concatenate(duration)


def aligned_time_integral(decomp: LoopDecomposition, loop_labels: np.ndarray,
                          intervals: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None) -> np.ndarray:
    """Integral over time of sum_e sigma_i sigma_j, per labeling in the batch."""
    seg_a, seg_b, duration = intervals if intervals is not None else edge_overlap_intervals(decomp)
    spins = segment_spins(decomp, loop_labels)
    return (spins[:, seg_a] * spins[:, seg_b]) @ duration
