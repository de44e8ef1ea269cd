"""
Emptiness Event Timelines

Poisson event timelines on edges x imaginary time [-beta/2, beta/2). Two
event kinds exist: an overpass exchanges the spins of its edge, a
cul-de-sac forces the edge to be antiparallel just before and just after
the event.

With u = (1 + delta) / 2 overpasses arrive at rate u/2 and cul-de-sacs at
rate (1 - u)/2 per edge, so that
    H_e = 1/4 - (u/2) T_e - ((1 - u)/2) K_e
with T the transposition and K the antiparallel double bar.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Tuple, Union

import numpy as np
from loguru import logger

from ..core.errors import ValidationError
from ..lattice.torus import Torus


class EventKind(int, Enum):
    OVERPASS = 0
    CUL_DE_SAC = 1

    @property
    def label(self) -> str:
        return "overpass" if self is EventKind.OVERPASS else "culdesac"

    @classmethod
    def parse(cls, label: str) -> "EventKind":
        labels = {"overpass": cls.OVERPASS, "culdesac": cls.CUL_DE_SAC}
        if label not in labels:
            raise ValidationError(f"unknown event kind {label!r}")
        return labels[label]


@dataclass(frozen=True)
class EventTimeline:
    """
    Events sorted by time; ``edge[k]`` indexes ``edges``.

    Invariants: times lie in [-beta/2, beta/2) and no edge carries two
    events at the same time.
    """
    beta: float
    n_sites: int
    edges: np.ndarray = field(repr=False, compare=False)
    edge: np.ndarray = field(repr=False, compare=False)
    time: np.ndarray = field(repr=False, compare=False)
    kind: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        if self.beta <= 0:
            raise ValidationError(f"beta must be positive, got {self.beta}")
        if not (len(self.edge) == len(self.time) == len(self.kind)):
            raise ValidationError("event arrays have different lengths")
        if len(self.time):
            half = self.beta / 2
            if np.any(self.time < -half) or np.any(self.time >= half):
                raise ValidationError("event times must lie in [-beta/2, beta/2)")
            if np.any(np.diff(self.time) < 0):
                raise ValidationError("events must be sorted by time")
            keys = np.stack([self.edge, self.time], axis=1)
            if len(np.unique(keys, axis=0)) != len(keys):
                raise ValidationError("two events share an (edge, time) pair")

    @classmethod
    def build(
        cls,
        beta: float,
        n_sites: int,
        edges: np.ndarray,
        events: List[Tuple[int, float, Union[EventKind, int]]]
    ) -> "EventTimeline":
        """Construct from an unsorted list of (edge index, time, kind)."""
        if events:
            edge, time, kind = (np.asarray(column) for column in zip(*events))
        else:
            edge, time, kind = np.zeros(0, int), np.zeros(0), np.zeros(0, int)
        order = np.argsort(time, kind="stable")
        return cls(
            beta=float(beta),
            n_sites=int(n_sites),
            edges=np.asarray(edges),
            edge=np.asarray(edge, dtype=np.int64)[order],
            time=np.asarray(time, dtype=float)[order],
            kind=np.asarray(kind, dtype=np.int8)[order],
        )

    @property
    def num_events(self) -> int:
        return len(self.time)

    def count(self, kind: EventKind) -> int:
        return int(np.sum(self.kind == int(kind)))

    def events(self) -> List[Tuple[int, float, EventKind]]:
        return [(int(e), float(t), EventKind(int(k))) for e, t, k in zip(self.edge, self.time, self.kind)]

    def events_on(self, edge_index: int) -> List[Tuple[float, EventKind]]:
        return [(t, k) for e, t, k in self.events() if e == edge_index]

    def with_event(self, edge_index: int, time: float, kind: EventKind) -> "EventTimeline":
        return EventTimeline.build(self.beta, self.n_sites, self.edges,
                                   self.events() + [(edge_index, time, kind)])

    def without_event(self, position: int) -> "EventTimeline":
        remaining = self.events()
        del remaining[position]
        return EventTimeline.build(self.beta, self.n_sites, self.edges, remaining)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "n_sites": self.n_sites,
            "edges": self.edges.tolist(),
            "events": [
                {"edge": e, "time": t, "kind": k.label} for e, t, k in self.events()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EventTimeline":
        data = json.loads(text)
        events = [(ev["edge"], ev["time"], EventKind.parse(ev["kind"])) for ev in data["events"]]
        return cls.build(data["beta"], data["n_sites"], np.asarray(data["edges"]), events)


def rates_for(u: float) -> Tuple[float, float]:
    """(overpass rate, cul-de-sac rate) for the mixing parameter ``u``."""
    return u / 2.0, (1.0 - u) / 2.0


def u_from_delta(delta: float) -> float:
    """Mixing parameter u = (1 + delta) / 2; requires |delta| <= 1."""
    if not -1.0 <= delta <= 1.0:
        raise ValidationError(
            f"|delta| = {abs(delta)} > 1: the loop representation needs |delta| <= 1; "
            "use the potential estimator instead"
        )
    return (1.0 + delta) / 2.0


def sample_timeline(
    torus: Torus,
    u: float,
    beta: float,
    rng_seed: Union[int, np.random.Generator, None] = None
) -> EventTimeline:
    """
    Sample independent Poisson events on every edge.

    Args:
        torus: Lattice
        u: Mixing parameter in [0, 1]
        beta: Length of the time circle, positive
        rng_seed: Seed or generator

    Returns:
        EventTimeline
    """
    if not 0.0 <= u <= 1.0:
        raise ValidationError(f"u must lie in [0, 1] (|delta| <= 1), got {u}")
    if beta <= 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)

    rate_over, rate_cul = rates_for(u)
    n_edges = torus.num_edges
    half = beta / 2.0
    edge_parts, time_parts, kind_parts = [], [], []
    for kind, rate in ((EventKind.OVERPASS, rate_over), (EventKind.CUL_DE_SAC, rate_cul)):
        if rate == 0.0:
            continue
        counts = rng.poisson(rate * beta, size=n_edges)
        total = int(counts.sum())
        edge_parts.append(np.repeat(np.arange(n_edges), counts))
        time_parts.append(rng.uniform(-half, half, size=total))
        kind_parts.append(np.full(total, int(kind), dtype=np.int8))

    if edge_parts:
        edge = np.concatenate(edge_parts)
        time = np.concatenate(time_parts)
        kind = np.concatenate(kind_parts)
    else:
        edge, time, kind = np.zeros(0, np.int64), np.zeros(0), np.zeros(0, np.int8)

    keys = np.stack([edge, time], axis=1)
    while len(np.unique(keys, axis=0)) != len(keys):
        logger.debug("Resampling colliding event times")
        time = rng.uniform(-half, half, size=len(time))
        keys = np.stack([edge, time], axis=1)

    order = np.argsort(time, kind="stable")
    return EventTimeline(
        beta=float(beta),
        n_sites=torus.num_sites,
        edges=torus.edges,
        edge=edge[order].astype(np.int64),
        time=time[order],
        kind=kind[order],
    )


def _edge_index(torus: Torus, a: int, b: int) -> int:
    lo, hi = min(a, b), max(a, b)
    hits = np.flatnonzero((torus.edges[:, 0] == lo) & (torus.edges[:, 1] == hi))
    if hits.size != 1:
        raise ValidationError(f"sites {a} and {b} are not joined by an edge")
    return int(hits[0])


def event_g_pattern(l: int) -> List[Tuple[int, float]]:
    """
    (k, time) pairs of the dipole construction: one cul-de-sac on the edge
    {k-1, k} at each listed time.
    """
    pattern = []
    for k in range(-l + 2, l + 1):
        for t in range(0, l + 1):
            if k % 2 == 0 and abs(k) <= 2 * t <= l - 1:
                pattern += [(k, 2 * t + 0.5), (k, -2 * t - 0.5)]
            elif k % 2 == 1 and abs(k) <= 2 * t - 1 <= l - 1:
                pattern += [(k, 2 * t - 0.5), (k, -2 * t + 0.5)]
    return pattern


def build_event_g(torus: Torus, l: int, beta: float) -> EventTimeline:
    """
    Deterministic cul-de-sac pattern supporting an all-up block at time 0.

    Args:
        torus: One-dimensional torus with n >= 2l
        l: Block side
        beta: Time-circle length, at least 2l

    Returns:
        EventTimeline with cul-de-sacs only
    """
    if torus.d != 1:
        raise ValidationError("the dipole construction is one-dimensional")
    if l < 1:
        raise ValidationError(f"l must be positive, got {l}")
    if beta < 2 * l:
        raise ValidationError(f"beta={beta} is below 2l={2 * l}; the construction spans [-l, l]")
    if torus.n < 2 * l:
        raise ValidationError(f"the window of 2l={2 * l} sites does not fit in n={torus.n}")

    events = []
    for k, time in event_g_pattern(l):
        edge = _edge_index(torus, torus.site_index((k - 1,)), torus.site_index((k,)))
        events.append((edge, time, EventKind.CUL_DE_SAC))
    return EventTimeline.build(beta, torus.num_sites, torus.edges, events)
