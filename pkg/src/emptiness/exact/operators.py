"""
Emptiness Exact Operators

This module builds operators on the Ising basis of a torus: the XXZ
Hamiltonian, the block projector Q_L, the contour projector, single-site
spin operators and magnetization sectors.

Basis state index s is the SpinConfig mask: bit k of s is site k, set = up.
Operators with at most ``DENSE_MAX_SITES`` sites are dense numpy arrays,
larger ones scipy CSR matrices.
"""

from dataclasses import dataclass, field
from math import comb
from typing import Dict, Optional, Union

import numpy as np
import scipy.sparse as sp
from loguru import logger

from ..core.errors import ValidationError
from ..lattice.torus import SpinConfig, Torus, universal_contour
from ..utils.resources import check_memory_budget, dense_matrix_bytes


DENSE_MAX_SITES = 12
SECTOR_MAX_SITES = 20
HERMITIAN_TOL = 1e-12

Matrix = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class SectorBasis:
    """Basis states with 2 S^z_tot = ``m2``, sorted by mask."""
    m2: int
    n_sites: int
    states: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, masks: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.states, masks)

    def configs(self):
        return [SpinConfig(int(s), self.n_sites) for s in self.states]


@dataclass(eq=False)
class OperatorMatrix:
    """
    A real (or, for spin-y tests, complex) operator on the Ising basis.

    ``basis`` is None for the full 2^N space, otherwise the sector the
    matrix acts on. ``delta`` records the anisotropy of Hamiltonians.
    """
    matrix: Matrix
    n_sites: int
    basis: Optional[SectorBasis] = None
    diagonal: bool = False
    delta: Optional[float] = None
    _spectral: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def diag(self) -> np.ndarray:
        return np.asarray(self.matrix.diagonal()).real if self.is_sparse else np.diag(self.matrix).real

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        if self.is_sparse:
            return float(abs(diff).max()) if diff.nnz else 0.0
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() < tol

    def conserves_sz(self) -> bool:
        """True if every nonzero entry connects states of equal popcount."""
        if self.basis is not None or self.diagonal:
            return True
        coo = sp.coo_matrix(self.matrix)
        keep = coo.data != 0
        return bool(np.all(popcount(coo.row[keep]) == popcount(coo.col[keep])))


def popcount(values: np.ndarray) -> np.ndarray:
    """Vectorized bit count of nonnegative integers below 2^32."""
    as_bytes = np.ascontiguousarray(np.asarray(values, dtype=">u4")).view(np.uint8)
    return np.unpackbits(as_bytes.reshape(-1, 4), axis=1).sum(axis=1).astype(np.int64)


def _check_full_space(n_sites: int, what: str) -> int:
    if n_sites > SECTOR_MAX_SITES:
        raise ValidationError(f"{what}: {n_sites} sites exceeds the exact limit of {SECTOR_MAX_SITES}")
    return 1 << n_sites


def _finalize(coo: sp.coo_matrix, n_sites: int, dense: bool) -> Matrix:
    if dense:
        return coo.toarray()
    return coo.tocsr()


def sector_basis(n_sites: int, m2: int) -> SectorBasis:
    """
    States with popcount (m2 + n_sites) / 2.

    Raises:
        ValidationError: If the sector label is impossible
    """
    if abs(m2) > n_sites or (m2 + n_sites) % 2:
        raise ValidationError(f"no magnetization sector m2={m2} on {n_sites} sites")
    dim = _check_full_space(n_sites, "sector basis")
    ups = (m2 + n_sites) // 2
    states = np.arange(dim, dtype=np.int64)
    states = states[popcount(states) == ups]
    if len(states) != comb(n_sites, ups):
        raise AssertionError("sector enumeration size mismatch")
    states.flags.writeable = False
    return SectorBasis(m2=m2, n_sites=n_sites, states=states)


def _edge_arrays(torus: Torus):
    return torus.edges[:, 0].astype(np.int64), torus.edges[:, 1].astype(np.int64)


def build_hamiltonian(
    torus: Torus,
    delta: float,
    basis: Optional[SectorBasis] = None,
    dense: Optional[bool] = None
) -> OperatorMatrix:
    """
    XXZ Hamiltonian -sum_edges (SxSx + SySy + delta SzSz) in the Ising basis.

    Off-diagonal entries are -1/2 between states differing by an exchange
    across an edge; the diagonal is -delta/4 * sum_edges sigma_i sigma_j.

    Args:
        torus: Lattice
        delta: Anisotropy
        basis: Restrict to this magnetization sector (full space if None)
        dense: Force dense/sparse storage (default by size threshold)

    Returns:
        Hermitian OperatorMatrix

    Raises:
        BudgetExceededError: If the matrix does not fit the memory budget
    """
    n_sites = torus.num_sites
    if basis is None:
        dim = _check_full_space(n_sites, "Hamiltonian")
        states = np.arange(dim, dtype=np.int64)
    else:
        if basis.n_sites != n_sites:
            raise ValidationError("sector basis does not match the torus")
        states = np.asarray(basis.states, dtype=np.int64)
        dim = basis.dim

    if dense is None:
        dense = dim <= (1 << DENSE_MAX_SITES)
    if dense:
        check_memory_budget(f"dense Hamiltonian of dimension {dim}", dense_matrix_bytes(dim))
    else:
        check_memory_budget(
            f"sparse Hamiltonian of dimension {dim}",
            dim * (torus.num_edges + 1) * 16
        )

    first, second = _edge_arrays(torus)
    diagonal = np.zeros(dim)
    rows, cols = [], []
    index = np.arange(dim)
    for i, j in zip(first, second):
        bit_i = (states >> i) & 1
        bit_j = (states >> j) & 1
        anti = bit_i != bit_j
        diagonal += np.where(anti, -1.0, 1.0)
        flipped = states[anti] ^ ((1 << i) | (1 << j))
        rows.append(index[anti])
        cols.append(flipped if basis is None else basis.index_of(flipped))
    diagonal *= -delta / 4.0

    rows = np.concatenate(rows + [index])
    cols = np.concatenate(cols + [index])
    data = np.concatenate([np.full(len(rows) - dim, -0.5), diagonal])
    coo = sp.coo_matrix((data, (rows, cols)), shape=(dim, dim))
    matrix = _finalize(coo, n_sites, dense)

    logger.debug(
        f"Hamiltonian delta={delta}: dim={dim}, {'dense' if dense else 'sparse'}"
        + (f", sector m2={basis.m2}" if basis is not None else "")
    )
    return OperatorMatrix(matrix=matrix, n_sites=n_sites, basis=basis, delta=delta)


def diagonal_operator(values: np.ndarray, n_sites: int, basis: Optional[SectorBasis] = None) -> OperatorMatrix:
    """Diagonal operator with the given entries."""
    values = np.asarray(values, dtype=float)
    if values.size <= (1 << DENSE_MAX_SITES):
        matrix: Matrix = np.diag(values)
    else:
        matrix = sp.diags(values, format="csr")
    return OperatorMatrix(matrix=matrix, n_sites=n_sites, basis=basis, diagonal=True)


def _states(n_sites: int, basis: Optional[SectorBasis]) -> np.ndarray:
    if basis is not None:
        return np.asarray(basis.states, dtype=np.int64)
    return np.arange(_check_full_space(n_sites, "operator"), dtype=np.int64)


def projector_q(torus: Torus, l: int, basis: Optional[SectorBasis] = None) -> OperatorMatrix:
    """
    Projector onto all spins up in the block of side ``l``.

    Args:
        torus: Lattice
        l: Block side, 0 <= l <= n
        basis: Optional sector restriction

    Returns:
        Diagonal 0/1 OperatorMatrix
    """
    block_mask = torus.block(l).mask
    states = _states(torus.num_sites, basis)
    values = ((states & block_mask) == block_mask).astype(float)
    return diagonal_operator(values, torus.num_sites, basis)


def projector_contour(torus: Torus, l: int) -> OperatorMatrix:
    """Rank-one diagonal projector onto the universal contour configuration."""
    contour = universal_contour(torus, l)
    states = _states(torus.num_sites, None)
    values = (states == contour.mask).astype(float)
    return diagonal_operator(values, torus.num_sites)


def identity_operator(n_sites: int) -> OperatorMatrix:
    return diagonal_operator(np.ones(_check_full_space(n_sites, "identity")), n_sites)


def total_sz(n_sites: int) -> OperatorMatrix:
    """Total S^z."""
    states = _states(n_sites, None)
    return diagonal_operator(popcount(states) - n_sites / 2.0, n_sites)


_SINGLE_SITE = {
    # Local basis order is (down, up), matching bit value 0/1.
    "x": np.array([[0.0, 0.5], [0.5, 0.0]]),
    "y": np.array([[0.0, 0.5j], [-0.5j, 0.0]]),
    "z": np.array([[-0.5, 0.0], [0.0, 0.5]]),
}


def spin_operator(n_sites: int, site: int, axis: str) -> OperatorMatrix:
    """
    Dense single-site spin operator S^axis_site.

    Args:
        n_sites: Number of sites
        site: Site index
        axis: One of "x", "y", "z"
    """
    if axis not in _SINGLE_SITE:
        raise ValidationError(f"axis must be x, y or z, got {axis!r}")
    if not 0 <= site < n_sites:
        raise ValidationError(f"site {site} out of range")
    check_memory_budget("dense spin operator", dense_matrix_bytes(1 << n_sites, 16))
    matrix = np.ones((1, 1))
    for k in reversed(range(n_sites)):
        factor = _SINGLE_SITE[axis] if k == site else np.eye(2)
        matrix = np.kron(matrix, factor)
    if axis != "y":
        matrix = matrix.real
    return OperatorMatrix(matrix=matrix, n_sites=n_sites, diagonal=(axis == "z"))


def restrict_to_sector(op: OperatorMatrix, basis: SectorBasis) -> OperatorMatrix:
    """Block of ``op`` acting within ``basis``."""
    if op.basis is not None:
        if op.basis.m2 != basis.m2:
            raise ValidationError("operator already lives in a different sector")
        return op
    idx = np.asarray(basis.states)
    if op.is_sparse:
        block = op.matrix.tocsr()[idx][:, idx]
        if basis.dim <= (1 << DENSE_MAX_SITES):
            block = block.toarray()
    else:
        block = op.matrix[np.ix_(idx, idx)]
    return OperatorMatrix(matrix=block, n_sites=op.n_sites, basis=basis,
                          diagonal=op.diagonal, delta=op.delta)


def uniform_superposition(n_sites: int) -> np.ndarray:
    """Normalized equal-weight superposition of all basis states."""
    dim = _check_full_space(n_sites, "uniform superposition")
    return np.full(dim, 1.0 / np.sqrt(dim))


def frustration_free_residual(torus: Torus) -> float:
    """Norm of (H at delta=1 plus |E|/4) applied to the uniform superposition."""
    h = build_hamiltonian(torus, 1.0)
    phi = uniform_superposition(torus.num_sites)
    return float(np.linalg.norm(h.matrix @ phi + 0.25 * torus.num_edges * phi))
