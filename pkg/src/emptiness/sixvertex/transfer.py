"""
Emptiness Row-to-Row Transfer Matrix

This module applies the six-vertex row-to-row transfer matrix A_{n,kappa}
on vectors over 2^n vertical-spin rows, finds its top eigenvector in a
magnetization sector and uses it for the one-dimensional ground-state EFP.

A[sigma, sigma'] sums over horizontal rows tau: where sigma_i = sigma'_i the
vertex passes tau straight through with weight 1, elsewhere it is a sink or
a source with tau_{i-1} = sigma'_i, tau_i = sigma_i and weight e^kappa. The
matrix is symmetric, entrywise nonnegative and has 2 on its diagonal.

A commutes with the XXZ chain Hamiltonian when delta = 1 - e^{2 kappa} / 2.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from loguru import logger
from scipy.sparse.linalg import LinearOperator

from ..core.errors import ValidationError
from ..exact.operators import SectorBasis, build_hamiltonian, sector_basis
from ..exact.thermal import block_weight, commutator_norm
from ..lattice.torus import SpinConfig, build_torus
from ..utils.resources import check_memory_budget, dense_matrix_bytes

MAX_TRANSFER_SITES = 20
DENSE_TRANSFER_SITES = 12
POWER_TOL = 1e-12
POWER_MAX_ITER = 200_000
_CHUNK = 256


def delta_from_kappa(kappa: float) -> float:
    """delta = 1 - e^{2 kappa} / 2."""
    return 1.0 - math.exp(2.0 * kappa) / 2.0


def kappa_from_delta(delta: float) -> float:
    """Inverse of :func:`delta_from_kappa`; needs delta < 1."""
    if delta >= 1.0:
        raise ValidationError(f"delta={delta} has no kappa: the six-vertex route needs delta < 1")
    return 0.5 * math.log(2.0 * (1.0 - delta))


def _check_width(n: int, limit: int = MAX_TRANSFER_SITES) -> None:
    if n < 4 or n % 2:
        raise ValidationError(f"transfer width n={n} must be even and at least 4")
    if n > limit:
        raise ValidationError(f"transfer width n={n} exceeds the limit of {limit} sites")


def _width_of(length: int) -> int:
    n = int(length).bit_length() - 1
    if length < 1 or (1 << n) != length:
        raise ValidationError(f"vector length {length} is not a power of two")
    return n


@lru_cache(maxsize=32)
def _vertex_tensor(kappa: float) -> np.ndarray:
    """R[tau_{i-1}, tau_i, sigma_i, sigma'_i] with bit 1 = up/right."""
    r = np.zeros((2, 2, 2, 2))
    boost = math.exp(kappa)
    for p in (0, 1):
        for s in (0, 1):
            r[p, p, s, s] = 1.0
            r[1 - s, s, s, 1 - s] = boost
    r.flags.writeable = False
    return r


def apply_transfer(x: np.ndarray, kappa: float) -> np.ndarray:
    """
    Compute A x without materializing A.

    The ring of horizontal spins is handled by fixing the wrap-around spin
    and contracting one vertex tensor per site.

    Args:
        x: Array of shape (2^n,) or (2^n, k)
        kappa: Sink/source weight parameter

    Returns:
        A x, same shape as ``x``
    """
    x = np.asarray(x, dtype=float)
    n = _width_of(x.shape[0])
    _check_width(n)
    r = _vertex_tensor(float(kappa))
    flat = x.reshape(1 << n, -1)
    out = np.zeros_like(flat)
    for wrap in (0, 1):
        state = np.zeros((2,) + flat.shape)
        state[wrap] = flat
        for i in range(n):
            view = state.reshape(2, 1 << (n - 1 - i), 2, 1 << i, flat.shape[1])
            state = np.einsum("pqst,phtlb->qhslb", r, view).reshape(2, 1 << n, flat.shape[1])
        out += state[wrap]
    return out.reshape(x.shape)


@dataclass(frozen=True)
class TransferOperator:
    """A_{n,kappa} as a matrix-free operator."""
    n: int
    kappa: float

    def __post_init__(self):
        _check_width(self.n)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return apply_transfer(x, self.kappa)

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(
            (self.dim, self.dim),
            matvec=self.matvec,
            matmat=self.matvec,
            rmatvec=self.matvec,
            dtype=float,
        )


def _apply_to_columns(n: int, kappa: float, columns: np.ndarray) -> np.ndarray:
    """A restricted to the given basis columns, all rows, shape (2^n, len(columns))."""
    out = np.empty((1 << n, len(columns)))
    for start in range(0, len(columns), _CHUNK):
        chunk = columns[start:start + _CHUNK]
        unit = np.zeros((1 << n, len(chunk)))
        unit[chunk, np.arange(len(chunk))] = 1.0
        out[:, start:start + len(chunk)] = apply_transfer(unit, kappa)
    return out


def dense_transfer(n: int, kappa: float) -> np.ndarray:
    """Materialize A_{n,kappa}; n <= 12."""
    _check_width(n, DENSE_TRANSFER_SITES)
    check_memory_budget(f"dense transfer matrix for n={n}", 2 * dense_matrix_bytes(1 << n))
    return _apply_to_columns(n, kappa, np.arange(1 << n))


def sector_transfer_block(n: int, kappa: float, m2: int) -> Tuple[SectorBasis, np.ndarray]:
    """A restricted to the sector ``m2`` as a dense matrix; n <= 12."""
    _check_width(n, DENSE_TRANSFER_SITES)
    basis = sector_basis(n, m2)
    check_memory_budget(f"transfer block for n={n}, m2={m2}", (1 << n) * basis.dim * 8)
    columns = _apply_to_columns(n, kappa, np.asarray(basis.states))
    return basis, columns[np.asarray(basis.states)]


def transfer_trace_power(n: int, kappa: float, t: int) -> float:
    """tr(A^t) over the full row space."""
    if t < 1:
        raise ValidationError(f"t must be positive, got {t}")
    return float(np.trace(np.linalg.matrix_power(dense_transfer(n, kappa), t)))


@dataclass
class TopEigenpair:
    """Perron eigenpair of A within one magnetization sector."""
    eigenvalue: float
    vector: np.ndarray = field(repr=False)
    basis: SectorBasis = field(repr=False)
    iterations: int
    converged: bool
    residual: float

    def __iter__(self):
        yield self.eigenvalue
        yield self.vector


def _finish(vector: np.ndarray) -> np.ndarray:
    vector = np.abs(vector) if np.all(vector >= -1e-14) or np.all(vector <= 1e-14) else vector
    return vector / np.linalg.norm(vector)


def _power_dense(block: np.ndarray, tol: float, max_iter: int):
    """Power iteration with periodic squaring of the iterated matrix."""
    dim = block.shape[0]
    vector = np.full(dim, 1.0 / math.sqrt(dim))
    power = block / np.abs(block).max()
    residual, value = math.inf, 0.0
    for iteration in range(1, max_iter + 1):
        image = power @ vector
        vector = image / np.linalg.norm(image)
        applied = block @ vector
        value = float(vector @ applied)
        residual = float(np.linalg.norm(applied - value * vector))
        if residual <= tol * abs(value):
            return value, vector, iteration, True, residual
        if iteration % 8 == 0:
            power = power @ power
            power /= np.abs(power).max()
    return value, vector, max_iter, False, residual


def _power_matrix_free(n: int, kappa: float, basis: SectorBasis, tol: float, max_iter: int):
    states = np.asarray(basis.states)
    vector = np.zeros(1 << n)
    vector[states] = 1.0 / math.sqrt(basis.dim)
    residual, value = math.inf, 0.0
    for iteration in range(1, max_iter + 1):
        applied = apply_transfer(vector, kappa)
        value = float(vector @ applied)
        residual = float(np.linalg.norm(applied - value * vector))
        if residual <= tol * abs(value):
            return value, vector[states], iteration, True, residual
        vector = applied / np.linalg.norm(applied)
    return value, vector[states], max_iter, False, residual


def sector_top_eigenvector(
    n: int,
    kappa: float,
    m2: int,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER
) -> TopEigenpair:
    """
    Largest eigenvalue of A in sector ``m2`` and its positive eigenvector.

    Args:
        n: Ring length, even, 4 <= n <= 20
        kappa: Weight parameter
        m2: Twice the magnetization of a row
        tol: Relative residual ||Av - lv|| / l for convergence
        max_iter: Iteration cap; reaching it clears ``converged``

    Returns:
        TopEigenpair with the vector over the sector basis
    """
    _check_width(n)
    if n <= DENSE_TRANSFER_SITES:
        basis, block = sector_transfer_block(n, kappa, m2)
        if basis.dim == 1:
            return TopEigenpair(float(block[0, 0]), np.ones(1), basis, 0, True, 0.0)
        value, vector, iterations, converged, residual = _power_dense(block, tol, max_iter)
    else:
        basis = sector_basis(n, m2)
        value, vector, iterations, converged, residual = _power_matrix_free(n, kappa, basis, tol, max_iter)

    if not converged:
        logger.warning(
            f"Power iteration for n={n}, kappa={kappa}, m2={m2} stopped after {iterations} "
            f"iterations with relative residual {residual / abs(value):.2e}"
        )
    logger.debug(f"Top eigenvalue n={n} kappa={kappa} m2={m2}: {value:.12g} after {iterations} iterations")
    return TopEigenpair(value, _finish(vector), basis, iterations, converged, residual)


def sutherland_check(n: int, kappa: float, delta: Optional[float] = None) -> float:
    """
    Frobenius norm of [A_{n,kappa}, H_{n,delta}].

    ``delta`` defaults to the commuting value 1 - e^{2 kappa} / 2.
    """
    _check_width(n, DENSE_TRANSFER_SITES)
    delta = delta_from_kappa(kappa) if delta is None else delta
    a = dense_transfer(n, kappa)
    h = build_hamiltonian(build_torus(1, n), delta, dense=True)
    return commutator_norm(a, h.toarray())


def efp_sixvertex(
    n: int,
    kappa: float,
    m2: int,
    l: int,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER
) -> float:
    """
    Ground-state EFP of the chain at delta(kappa) from the transfer matrix.

    The sum of squared top-eigenvector components over sector states with
    every block site up.
    """
    if not 0 <= l <= n:
        raise ValidationError(f"block side l={l} must satisfy 0 <= l <= n={n}")
    if l == 0:
        return 1.0
    top = sector_top_eigenvector(n, kappa, m2, tol=tol, max_iter=max_iter)
    mask = build_torus(1, n).block(l).mask
    return block_weight(top.basis, top.vector, mask)


def component_ratio_finite_t(
    n: int,
    kappa: float,
    m2: int,
    sigma: Union[SpinConfig, int],
    t: int
) -> float:
    """
    (A^t)_{sigma sigma} / tr_{m2}(A^t): the weight of configurations with
    row 0 equal to ``sigma`` among those in the sector, on an n x t torus.
    """
    if t < 1:
        raise ValidationError(f"t must be positive, got {t}")
    mask = sigma.mask if isinstance(sigma, SpinConfig) else int(sigma)
    basis, block = sector_transfer_block(n, kappa, m2)
    index = int(basis.index_of(np.array([mask]))[0])
    if index >= basis.dim or basis.states[index] != mask:
        raise ValidationError(f"row {mask:b} is not in sector m2={m2}")
    power = np.linalg.matrix_power(block / np.abs(block).sum(axis=0).max(), t)
    return float(power[index, index] / np.trace(power))
