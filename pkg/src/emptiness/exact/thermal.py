"""
Emptiness Exact Thermal and Ground-State Routines

Spectral decompositions of operators built in ``operators``: thermal
expectations, partition functions, sector ground states, the exact EFP
and commutator norms.

Matrix exponentials are always taken through the eigendecomposition,
shifted by the lowest eigenvalue. Above ``DENSE_MAX_SITES`` the
decomposition is done sector by sector, which requires H to conserve S^z.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.special
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from loguru import logger

from ..core.errors import EmptinessError, ValidationError
from ..lattice.torus import SpinConfig, Torus
from ..utils.resources import check_memory_budget, dense_matrix_bytes
from .operators import (
    DENSE_MAX_SITES,
    HERMITIAN_TOL,
    OperatorMatrix,
    SectorBasis,
    build_hamiltonian,
    projector_q,
    restrict_to_sector,
    sector_basis,
)


DEGENERACY_TOL = 1e-10
DENSE_SECTOR_DIM = 2000


@dataclass
class SpectralBlock:
    """Eigenpairs of one diagonal block; ``states`` index the full basis."""
    states: np.ndarray
    values: np.ndarray
    vectors: np.ndarray


@dataclass
class GroundState:
    """Ground state of H within one magnetization sector."""
    energy: float
    vector: np.ndarray
    basis: SectorBasis
    gap: Optional[float]
    degenerate: bool

    def __iter__(self):
        yield self.energy
        yield self.vector


def _require_hermitian(h: OperatorMatrix) -> None:
    error = h.hermiticity_error()
    if error >= HERMITIAN_TOL:
        raise ValidationError(f"operator is not Hermitian (max |H - H^T| = {error:.3e})")


def spectral_blocks(h: OperatorMatrix) -> List[SpectralBlock]:
    """
    Eigendecomposition of ``h``, full if small, sector-blocked otherwise.

    The result is cached on the operator.
    """
    cached = h._spectral.get("blocks")
    if cached is not None:
        return cached
    _require_hermitian(h)

    if h.basis is not None or h.dim <= (1 << DENSE_MAX_SITES):
        check_memory_budget(f"dense eigendecomposition of dimension {h.dim}", 3 * dense_matrix_bytes(h.dim))
        values, vectors = scipy.linalg.eigh(h.toarray())
        states = np.asarray(h.basis.states) if h.basis is not None else np.arange(h.dim)
        blocks = [SpectralBlock(states=states, values=values, vectors=vectors)]
    else:
        if not h.conserves_sz():
            raise ValidationError("operator does not conserve S^z; sector blocking impossible")
        blocks = []
        for m2 in range(-h.n_sites, h.n_sites + 1, 2):
            basis = sector_basis(h.n_sites, m2)
            check_memory_budget(
                f"dense sector eigendecomposition of dimension {basis.dim}",
                3 * dense_matrix_bytes(basis.dim)
            )
            block = restrict_to_sector(h, basis)
            values, vectors = scipy.linalg.eigh(block.toarray())
            blocks.append(SpectralBlock(states=np.asarray(basis.states), values=values, vectors=vectors))
            logger.debug(f"Diagonalized sector m2={m2} of dimension {basis.dim}")

    h._spectral["blocks"] = blocks
    return blocks


def full_spectrum(h: OperatorMatrix) -> np.ndarray:
    """Sorted eigenvalues of ``h`` by dense diagonalization."""
    _require_hermitian(h)
    check_memory_budget(f"dense spectrum of dimension {h.dim}", 2 * dense_matrix_bytes(h.dim))
    return scipy.linalg.eigvalsh(h.toarray())


def sector_spectra(h: OperatorMatrix) -> Dict[int, np.ndarray]:
    """Eigenvalues of every magnetization block of an S^z-conserving ``h``."""
    if not h.conserves_sz():
        raise ValidationError("operator does not conserve S^z")
    _require_hermitian(h)
    spectra = {}
    for m2 in range(-h.n_sites, h.n_sites + 1, 2):
        basis = sector_basis(h.n_sites, m2)
        check_memory_budget(f"dense sector spectrum of dimension {basis.dim}", dense_matrix_bytes(basis.dim))
        block = restrict_to_sector(h, basis).toarray()
        spectra[m2] = scipy.linalg.eigvalsh(block, overwrite_a=True, check_finite=False)
    return spectra


def _ground_energy(blocks: List[SpectralBlock]) -> float:
    return min(float(b.values[0]) for b in blocks)


def _block_of(x: OperatorMatrix, states: np.ndarray) -> np.ndarray:
    if x.is_sparse:
        return x.matrix.tocsr()[states][:, states].toarray()
    return np.asarray(x.matrix)[np.ix_(states, states)]


def thermal_traces(h: OperatorMatrix, x: OperatorMatrix, beta: float) -> Tuple[float, float, float]:
    """
    Shifted traces of X e^{-beta H} and e^{-beta H}.

    Returns:
        (tr(X e^{-beta (H - E0)}), tr(e^{-beta (H - E0)}), E0)
    """
    if x.dim != h.dim:
        raise ValidationError(f"dimension mismatch: H has {h.dim}, X has {x.dim}")
    blocks = spectral_blocks(h)
    e0 = _ground_energy(blocks)
    numerator = 0.0
    denominator = 0.0
    offset = 0
    for block in blocks:
        weights = np.exp(-beta * (block.values - e0))
        if h.basis is not None:
            local = np.arange(offset, offset + len(block.states))
        else:
            local = block.states
        if x.diagonal:
            x_diag = x.diag()[local]
            expectations = np.einsum("i,ik,ik->k", x_diag, block.vectors, block.vectors.conj()).real
        else:
            x_block = _block_of(x, local)
            expectations = np.einsum("ik,ij,jk->k", block.vectors.conj(), x_block, block.vectors).real
        numerator += float(weights @ expectations)
        denominator += float(weights.sum())
        offset += len(block.states)
    return numerator, denominator, e0


def thermal_expectation(h: OperatorMatrix, x: OperatorMatrix, beta: float) -> float:
    """
    Equilibrium expectation tr(X e^{-beta H}) / tr(e^{-beta H}).

    Args:
        h: Hermitian Hamiltonian
        x: Observable on the same space
        beta: Inverse temperature, nonnegative

    Returns:
        The (real part of the) expectation
    """
    if beta < 0:
        raise ValidationError(f"beta must be nonnegative, got {beta}")
    _require_hermitian(h)
    if beta == 0:
        return float(np.real(x.diag().sum())) / x.dim
    numerator, denominator, _ = thermal_traces(h, x, beta)
    return numerator / denominator


def log_partition_function(h: OperatorMatrix, beta: float) -> float:
    """Natural log of tr e^{-beta H}."""
    if beta == 0:
        return float(np.log(h.dim))
    cached = h._spectral.get("blocks")
    if cached is not None:
        values = np.concatenate([b.values for b in cached])
    elif h.basis is not None or not h.conserves_sz():
        values = full_spectrum(h)
    else:
        values = np.concatenate(list(sector_spectra(h).values()))
    return float(scipy.special.logsumexp(-beta * values))


def kernel_element(h: OperatorMatrix, beta: float, sigma: SpinConfig, tau: SpinConfig) -> float:
    """Matrix element <Psi(tau), e^{-beta H} Psi(sigma)> on the full space."""
    if h.basis is not None:
        raise ValidationError("kernel_element needs a full-space Hamiltonian")
    total = 0.0
    for block in spectral_blocks(h):
        where_s = np.flatnonzero(block.states == sigma.mask)
        where_t = np.flatnonzero(block.states == tau.mask)
        if where_s.size == 0 or where_t.size == 0:
            continue
        weights = np.exp(-beta * block.values)
        total += float(np.sum(weights * block.vectors[where_t[0]] * block.vectors[where_s[0]]))
    return total


def sector_ground_state(
    h: OperatorMatrix,
    m2: int,
    degeneracy_tol: float = DEGENERACY_TOL,
    lanczos_tol: float = 1e-12
) -> GroundState:
    """
    Lowest eigenpair of ``h`` restricted to the sector ``m2``.

    The vector is normalized with its global sign chosen so the entries sum
    to a nonnegative number; for the XXZ chain with delta < 1 all entries are
    then nonnegative. A gap below ``degeneracy_tol`` sets ``degenerate``.

    Args:
        h: Hamiltonian on the full space or already on sector ``m2``
        m2: Twice the total S^z
        degeneracy_tol: Gap threshold for the degeneracy flag
        lanczos_tol: Tolerance for the iterative solver on large sectors

    Returns:
        GroundState
    """
    if h.delta is not None and h.delta >= 1:
        logger.warning(f"delta={h.delta} >= 1: the sector ground state need not be unique")
    basis = sector_basis(h.n_sites, m2) if h.basis is None else h.basis
    if basis.m2 != m2:
        raise ValidationError(f"operator lives in sector {basis.m2}, not {m2}")
    if basis.dim == 0:
        raise ValidationError(f"sector m2={m2} is empty")
    block = restrict_to_sector(h, basis)

    if basis.dim == 1:
        energy = float(block.diag()[0])
        return GroundState(energy=energy, vector=np.ones(1), basis=basis, gap=None, degenerate=False)

    if basis.dim <= DENSE_SECTOR_DIM:
        values, vectors = scipy.linalg.eigh(block.toarray(), subset_by_index=[0, 1])
    else:
        matrix = block.matrix if block.is_sparse else sp.csr_matrix(block.matrix)
        values, vectors = spla.eigsh(matrix, k=2, which="SA", tol=lanczos_tol)
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]

    vector = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
    if vector.sum() < 0:
        vector = -vector
    gap = float(values[1] - values[0])
    degenerate = gap < degeneracy_tol
    if degenerate:
        logger.warning(f"Ground state in sector m2={m2} is degenerate (gap {gap:.2e})")
    logger.debug(f"Sector m2={m2}: dim={basis.dim}, E0={values[0]:.12f}, gap={gap:.3e}")
    return GroundState(energy=float(values[0]), vector=vector, basis=basis, gap=gap, degenerate=degenerate)


def block_weight(basis: SectorBasis, vector: np.ndarray, block_mask: int) -> float:
    """Sum of squared components over states with every block bit set."""
    states = np.asarray(basis.states)
    selected = (states & block_mask) == block_mask
    return float(np.sum(np.abs(vector[selected]) ** 2))


def efp_ground_sector(torus: Torus, delta: float, m2: int, l: int) -> float:
    """
    Ground-state EFP <psi, Q_L psi> within the magnetization sector ``m2``.

    Args:
        torus: Lattice
        delta: Anisotropy, below 1
        m2: Twice the total S^z
        l: Block side

    Returns:
        EFP value in [0, 1]
    """
    block = torus.block(l)
    if l == 0 or m2 == torus.num_sites:
        return 1.0
    basis = sector_basis(torus.num_sites, m2)
    h = build_hamiltonian(torus, delta, basis=basis)
    ground = sector_ground_state(h, m2)
    if ground.degenerate:
        logger.warning("EFP from a degenerate ground state depends on the solver's choice of vector")
    return block_weight(basis, ground.vector, block.mask)


def efp_thermal(torus: Torus, delta: float, beta: float, l: int) -> float:
    """
    Thermal EFP <Q_L> at inverse temperature ``beta``.

    Also checks that e^{-beta |E|/4} tr e^{-beta H} >= 1.
    """
    h = build_hamiltonian(torus, delta)
    q = projector_q(torus, l)
    value = thermal_expectation(h, q, beta)
    if beta > 0:
        log_den = log_partition_function(h, beta) - beta * torus.num_edges / 4.0
        if log_den < -1e-10:
            raise EmptinessError(f"partition function lower bound violated: log Den = {log_den:.3e}")
    return value


def commutator_norm(
    a: Union[OperatorMatrix, np.ndarray, sp.spmatrix],
    b: Union[OperatorMatrix, np.ndarray, sp.spmatrix]
) -> float:
    """
    Frobenius norm of AB - BA.

    Raises:
        ValidationError: On dimension mismatch
    """
    ma = a.matrix if isinstance(a, OperatorMatrix) else a
    mb = b.matrix if isinstance(b, OperatorMatrix) else b
    if ma.shape != mb.shape:
        raise ValidationError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    diff = ma @ mb - mb @ ma
    if sp.issparse(diff):
        return float(spla.norm(diff, "fro"))
    return float(np.linalg.norm(diff, "fro"))
