"""
Emptiness Lattice Geometry

This module builds the periodic d-dimensional torus with side n, its
sub-blocks, the universal contour pattern and the reflection geometry used
by every other module.

Sites are the coordinate box {-n/2+1, ..., n/2}^d enumerated row-major (first
coordinate slowest). Spin configurations are bit masks over the sites:
bit k set means site k carries spin up.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ..core.errors import ValidationError
from ..utils.resources import memory_budget, format_bytes


@dataclass(frozen=True)
class SpinConfig:
    """A basis configuration: ``mask`` bit k set means site k is up."""
    mask: int
    n_sites: int

    def __post_init__(self):
        if self.n_sites < 0:
            raise ValidationError("n_sites must be nonnegative")
        if self.mask < 0 or self.mask >> self.n_sites:
            raise ValidationError(f"mask {self.mask} does not fit in {self.n_sites} sites")

    @classmethod
    def all_up(cls, n_sites: int) -> "SpinConfig":
        return cls((1 << n_sites) - 1, n_sites)

    @classmethod
    def from_signs(cls, signs: Iterable[int]) -> "SpinConfig":
        values = [int(s) for s in signs]
        if any(s not in (-1, 1) for s in values):
            raise ValidationError("spin signs must be +1 or -1")
        mask = 0
        for k, s in enumerate(values):
            if s == 1:
                mask |= 1 << k
        return cls(mask, len(values))

    def signs(self) -> np.ndarray:
        bits = np.array([(self.mask >> k) & 1 for k in range(self.n_sites)], dtype=np.int64)
        return 2 * bits - 1

    def is_up(self, site: int) -> bool:
        return bool((self.mask >> site) & 1)

    @property
    def popcount(self) -> int:
        return bin(self.mask).count("1")

    @property
    def m2(self) -> int:
        """Twice the total S^z."""
        return 2 * self.popcount - self.n_sites

    def __str__(self) -> str:
        return "".join("+" if self.is_up(k) else "-" for k in range(self.n_sites))


@dataclass(frozen=True)
class Block:
    """The centred sub-box of side ``l`` inside a torus."""
    l: int
    members: np.ndarray = field(repr=False, compare=False)

    @property
    def sites(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    @property
    def size(self) -> int:
        return int(self.members.sum())

    @property
    def mask(self) -> int:
        mask = 0
        for site in self.sites:
            mask |= 1 << int(site)
        return mask


@dataclass(frozen=True)
class HalfSplit:
    """Bond-centred reflection of a torus across two parallel planes."""
    left: np.ndarray = field(repr=False)
    mirror: np.ndarray = field(repr=False)

    @property
    def right(self) -> np.ndarray:
        return np.sort(self.mirror)


@dataclass(frozen=True)
class Torus:
    """
    Discrete torus of dimension ``d`` and even side ``n``.

    ``coords[k]`` is the coordinate vector of site k and ``edges`` holds each
    nearest-neighbour pair (wraparound included) once, sorted.
    """
    d: int
    n: int
    coords: np.ndarray = field(repr=False, compare=False)
    edges: np.ndarray = field(repr=False, compare=False)

    @property
    def num_sites(self) -> int:
        return self.n ** self.d

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def low(self) -> int:
        return -self.n // 2 + 1

    def site_index(self, coord: Sequence[int]) -> int:
        if len(coord) != self.d:
            raise ValidationError(f"coordinate {tuple(coord)} is not {self.d}-dimensional")
        offsets = tuple((int(c) - self.low) % self.n for c in coord)
        return int(np.ravel_multi_index(offsets, (self.n,) * self.d))

    def coordinate(self, site: int) -> Tuple[int, ...]:
        return tuple(int(c) for c in self.coords[site])

    def neighbors(self, site: int) -> List[int]:
        hits = self.edges[(self.edges[:, 0] == site) | (self.edges[:, 1] == site)]
        return sorted(int(b) if a == site else int(a) for a, b in hits)

    def adjacency(self) -> csr_matrix:
        """Symmetric 0/1 adjacency matrix."""
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(len(rows), dtype=np.int8)
        return csr_matrix((data, (rows, cols)), shape=(self.num_sites, self.num_sites))

    def bipartition(self) -> np.ndarray:
        """
        Proper 2-colouring found by breadth-first search.

        Returns:
            Array of colours 0/1 per site

        Raises:
            ValidationError: If the graph has an odd cycle
        """
        colour = np.full(self.num_sites, -1, dtype=np.int64)
        adjacency = [self.neighbors(s) for s in range(self.num_sites)]
        for start in range(self.num_sites):
            if colour[start] >= 0:
                continue
            colour[start] = 0
            queue = deque([start])
            while queue:
                site = queue.popleft()
                for other in adjacency[site]:
                    if colour[other] < 0:
                        colour[other] = 1 - colour[site]
                        queue.append(other)
                    elif colour[other] == colour[site]:
                        raise ValidationError("torus graph is not bipartite")
        return colour

    def block(self, l: int) -> Block:
        """
        Sub-box of side ``l``: coordinates in {-ceil(l/2)+1, ..., floor(l/2)}^d.

        Args:
            l: Side length, 0 <= l <= n

        Returns:
            The block with its member mask
        """
        if not 0 <= l <= self.n:
            raise ValidationError(f"block side l={l} must satisfy 0 <= l <= n={self.n}")
        lo = -((l + 1) // 2) + 1
        hi = l // 2
        members = np.all((self.coords >= lo) & (self.coords <= hi), axis=1)
        members.flags.writeable = False
        return Block(l=l, members=members)

    def half_split(self) -> HalfSplit:
        """
        Split along the first axis into {x_0 < n/2} and its mirror image.

        In 0-based coordinates u = x mod n the reflection is u_0 -> n-1-u_0;
        ``mirror[k]`` is the image of ``left[k]``.
        """
        zero_based = np.mod(self.coords, self.n)
        left = np.flatnonzero(zero_based[:, 0] < self.n // 2)
        reflected = zero_based[left].copy()
        reflected[:, 0] = self.n - 1 - reflected[:, 0]
        # site indices are row-major over x - low, not over x mod n
        offsets = np.mod(reflected - self.low, self.n)
        mirror = np.ravel_multi_index(tuple(offsets.T), (self.n,) * self.d)
        return HalfSplit(left=left, mirror=np.asarray(mirror))


def build_torus(d: int, n: int) -> Torus:
    """
    Build the discrete torus of dimension ``d`` and side ``n``.

    Args:
        d: Dimension, at least 1
        n: Side length, even and at least 4

    Returns:
        Torus with row-major sites and d * n^d edges

    Raises:
        ValidationError: On odd or too small ``n`` or nonpositive ``d``
    """
    if d < 1:
        raise ValidationError(f"dimension d must be at least 1, got {d}")
    if n % 2 != 0:
        raise ValidationError(f"n must be even (the torus side is always even), got n={n}")
    if n < 4:
        raise ValidationError(f"n must be at least 4 so that edges are distinct, got n={n}")

    n_sites = n ** d
    vector_bytes = 8 * (1 << n_sites) if n_sites < 64 else None
    if vector_bytes is None or vector_bytes > memory_budget():
        logger.warning(
            f"Torus d={d}, n={n}: a state vector over 2^{n_sites} configurations "
            f"exceeds the memory budget ({format_bytes(memory_budget())}); "
            "only sampling and closed-form routes will work"
        )

    shape = (n,) * d
    offsets = np.indices(shape).reshape(d, -1).T
    coords = offsets + (-n // 2 + 1)

    edge_list = []
    for axis in range(d):
        shifted = offsets.copy()
        shifted[:, axis] = (shifted[:, axis] + 1) % n
        targets = np.ravel_multi_index(tuple(shifted.T), shape)
        sources = np.arange(n_sites)
        edge_list.append(np.stack([np.minimum(sources, targets), np.maximum(sources, targets)], axis=1))
    edges = np.concatenate(edge_list, axis=0)

    coords.flags.writeable = False
    edges.flags.writeable = False
    torus = Torus(d=d, n=n, coords=coords, edges=edges)
    logger.debug(f"Built torus d={d}, n={n}: {torus.num_sites} sites, {torus.num_edges} edges")
    return torus


def _check_contour_side(torus: Torus, l: int) -> None:
    if l < 1:
        raise ValidationError(f"contour side l must be at least 1, got {l}")
    if l > torus.n // 2:
        raise ValidationError(
            f"contour side l={l} exceeds n/2={torus.n // 2}; chessboard reflections need l <= n/2"
        )


def contour_block_index(torus: Torus, l: int) -> np.ndarray:
    """Per-site block index vector floor((2 i_k - 1) / (2l))."""
    _check_contour_side(torus, l)
    return np.floor_divide(2 * torus.coords - 1, 2 * l)


def universal_contour(torus: Torus, l: int) -> SpinConfig:
    """
    Antiperiodic block pattern tau_i = (-1)^{sum_k floor((2 i_k - 1) / (2l))}.

    Args:
        torus: Torus to pattern
        l: Block side, 1 <= l <= n/2

    Returns:
        SpinConfig of the contour
    """
    parity = np.mod(contour_block_index(torus, l).sum(axis=1), 2)
    return SpinConfig.from_signs(np.where(parity == 0, 1, -1))


def contour_interfaces(torus: Torus, l: int) -> np.ndarray:
    """Indices of edges whose endpoints carry opposite contour signs."""
    signs = universal_contour(torus, l).signs()
    return np.flatnonzero(signs[torus.edges[:, 0]] != signs[torus.edges[:, 1]])


def boundary_layer(torus: Torus, l: int, r: int) -> np.ndarray:
    """
    Sites of each contour block within distance ``r`` of the block's complement.

    Args:
        torus: Torus
        l: Contour block side
        r: Distance, at least 1

    Returns:
        Sorted site indices
    """
    if r < 1:
        raise ValidationError(f"distance r must be at least 1, got {r}")
    index = contour_block_index(torus, l)
    a, b = torus.edges[:, 0], torus.edges[:, 1]
    crossing = np.any(index[a] != index[b], axis=1)
    frontier = np.unique(np.concatenate([a[crossing], b[crossing]]))
    if frontier.size == 0:
        return frontier
    distances = shortest_path(torus.adjacency(), unweighted=True, indices=frontier)
    to_frontier = np.atleast_2d(distances).min(axis=0)
    return np.flatnonzero(to_frontier + 1 <= r)
