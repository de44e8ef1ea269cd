"""
Emptiness Operator-Inequality Verifiers

Numerical checks, on small tori, of the operator inequalities behind the
EFP upper bound: the generalized Hölder inequality, the chessboard
estimate, reflection positivity of the rotated XXZ state and the lower
bound e^{-beta |E|/4} Z >= 1 on the partition function.

Every check compares two numbers and passes iff lhs <= rhs + slack.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Union

import numpy as np
import scipy.linalg
from loguru import logger
from tqdm import tqdm

from ..core.errors import ValidationError
from ..exact.operators import OperatorMatrix, build_hamiltonian, projector_contour, projector_q
from ..exact.thermal import log_partition_function, thermal_expectation
from ..lattice.torus import Torus
from ..utils.resources import check_memory_budget, dense_matrix_bytes
from .formulas import chessboard_report

SLACK = 1e-10

Operator = Union[OperatorMatrix, np.ndarray]


@dataclass
class VerifyResult:
    """One inequality lhs <= rhs evaluated numerically."""
    name: str
    lhs: float
    rhs: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self) -> Iterator[Any]:
        yield self.lhs
        yield self.rhs
        yield self.passed

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _check(name: str, lhs: float, rhs: float, slack: float, **details: Any) -> VerifyResult:
    result = VerifyResult(name, float(lhs), float(rhs), bool(lhs <= rhs + slack), details)
    if result.passed:
        logger.debug(f"{name}: {lhs:.6e} <= {rhs:.6e} {details}")
    else:
        logger.warning(f"{name} failed: {lhs:.6e} > {rhs:.6e} {details}")
    return result


def _dense(op: Operator) -> np.ndarray:
    return op.toarray() if isinstance(op, OperatorMatrix) else np.asarray(op)


def holder_verify(
    h: OperatorMatrix,
    a: Operator,
    n_half: int,
    beta: float,
    slack: float = SLACK
) -> VerifyResult:
    """
    Generalized Hölder inequality with 2n = 2 * n_half time slices.

    For Hermitian A the right side is (Z^-1 tr[(A e^{-beta H/2n})^{2n}])^{1/2n};
    otherwise (Z^-1 tr[(e^{-beta H/4n} A e^{-beta H/2n} A* e^{-beta H/4n})^n])^{1/2n}.
    Both sides are evaluated in the eigenbasis of H with the spectrum
    shifted to start at zero, which leaves the ratios unchanged.

    Args:
        h: Hermitian Hamiltonian
        a: Operator on the same space
        n_half: n, at least 1
        beta: Inverse temperature, nonnegative
        slack: Absolute tolerance

    Returns:
        VerifyResult with lhs = |<A>_beta|
    """
    if n_half < 1:
        raise ValidationError(f"n_half must be at least 1, got {n_half}")
    if beta < 0:
        raise ValidationError(f"beta must be nonnegative, got {beta}")
    matrix = _dense(a)
    if matrix.shape != (h.dim, h.dim):
        raise ValidationError(f"dimension mismatch: H has {h.dim}, A has shape {matrix.shape}")
    check_memory_budget(f"Hölder check of dimension {h.dim}", 6 * dense_matrix_bytes(h.dim, 16))

    values, vectors = scipy.linalg.eigh(h.toarray())
    shifted = values - values[0]
    z = float(np.exp(-beta * shifted).sum())
    rotated = vectors.conj().T @ matrix @ vectors
    lhs = abs(np.sum(np.diag(rotated) * np.exp(-beta * shifted))) / z

    slices = 2 * n_half
    half_step = np.exp(-beta * shifted / slices)
    hermitian = np.allclose(matrix, matrix.conj().T, atol=1e-12)
    if hermitian:
        product = rotated * half_step[None, :]
        trace = np.trace(np.linalg.matrix_power(product, slices)).real
    else:
        quarter_step = np.exp(-beta * shifted / (2 * slices))
        inner = (quarter_step[:, None] * rotated * half_step[None, :]) @ (rotated.conj().T * quarter_step[None, :])
        eigen = np.clip(scipy.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None)
        trace = float(np.sum(eigen ** n_half))
    rhs = max(trace / z, 0.0) ** (1.0 / slices)
    return _check("holder", lhs, rhs, slack, n_half=n_half, beta=beta, hermitian=bool(hermitian))


def chessboard_verify(
    torus: Torus,
    delta: float,
    beta: float,
    l: int,
    slack: float = SLACK
) -> VerifyResult:
    """
    Chessboard estimate <Q_L>_beta <= <Q-hat_{N,L}>_beta^{1/K}.

    Both projectors are diagonal, so they are unchanged by the sublattice
    rotation that makes the state reflection positive and the plain XXZ
    Hamiltonian can be used.

    Raises:
        ValidationError: If delta > 0 or l is not in 1..n/2
    """
    if delta > 0:
        raise ValidationError(f"chessboard estimates need delta <= 0, got {delta}")
    exponent = chessboard_report(torus.n, l, torus.d)
    k = exponent.inputs["K"]
    h = build_hamiltonian(torus, delta)
    lhs = thermal_expectation(h, projector_q(torus, l), beta)
    contour = thermal_expectation(h, projector_contour(torus, l), beta)
    rhs = max(contour, 0.0) ** (1.0 / k)
    return _check(
        "chessboard", lhs, rhs, slack,
        d=torus.d, n=torus.n, l=l, delta=delta, beta=beta, K=k, lossy=not exponent.valid
    )


@dataclass
class RpReport:
    """Reflection-positivity expectations <A F(A)>_beta over random trials."""
    values: List[float]
    slack: float = SLACK

    @property
    def trials(self) -> int:
        return len(self.values)

    @property
    def minimum(self) -> float:
        return min(self.values) if self.values else 0.0

    @property
    def failures(self) -> int:
        return sum(value < -self.slack for value in self.values)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def __bool__(self) -> bool:
        return self.passed


def _half_indices(torus: Torus):
    """Left-half and mirror-half basis indices of every full basis state."""
    split = torus.half_split()
    states = np.arange(1 << torus.num_sites, dtype=np.int64)
    left_index = np.zeros_like(states)
    mirror_index = np.zeros_like(states)
    for k, (site, image) in enumerate(zip(split.left, split.mirror)):
        left_index |= ((states >> int(site)) & 1) << k
        mirror_index |= ((states >> int(image)) & 1) << k
    right_mask = 0
    for site in split.mirror:
        right_mask |= 1 << int(site)
    return left_index, mirror_index, right_mask


def rotated_hamiltonian(torus: Torus, delta: float) -> OperatorMatrix:
    """
    U H U with U flipping every spin on the mirror half; the bonds across
    both reflection planes then have nonnegative real-reflected couplings
    for delta <= 0.
    """
    if torus.n % 2 != 0:
        raise ValidationError(f"reflection needs an even side, got n={torus.n}")
    h = build_hamiltonian(torus, delta, dense=True)
    _, _, right_mask = _half_indices(torus)
    perm = np.arange(h.dim) ^ right_mask
    matrix = np.asarray(h.matrix)[np.ix_(perm, perm)]
    return OperatorMatrix(matrix=matrix, n_sites=h.n_sites, delta=delta)


def rp_expectation(torus: Torus, h_rotated: OperatorMatrix, a_left: np.ndarray, beta: float) -> float:
    """
    <(A (x) I) F(A)>_beta for a real operator ``a_left`` on the left half.

    F(A) acts on the mirror half with the same matrix entries; the two
    factors commute, so the product has entries
    A[left(s), left(s')] * A[mirror(s), mirror(s')].
    """
    a_left = np.asarray(a_left, dtype=float)
    half = 1 << len(torus.half_split().left)
    if a_left.shape != (half, half):
        raise ValidationError(f"half-space operator must be {half}x{half}, got {a_left.shape}")
    check_memory_budget(f"reflection product of dimension {h_rotated.dim}", 2 * dense_matrix_bytes(h_rotated.dim))
    left_index, mirror_index, _ = _half_indices(torus)
    product = a_left[np.ix_(left_index, left_index)] * a_left[np.ix_(mirror_index, mirror_index)]
    x = OperatorMatrix(matrix=product, n_sites=torus.num_sites)
    return thermal_expectation(h_rotated, x, beta)


def rp_verify(
    torus: Torus,
    delta: float,
    beta: float,
    trials: int = 100,
    seed: Optional[int] = None,
    slack: float = SLACK,
    progress: bool = False
) -> RpReport:
    """
    Reflection positivity of the rotated XXZ state on random real
    operators supported on the left half.

    Trial k draws its operator, entrywise uniform on [-1, 1] and then
    symmetrized, from its own child of ``seed``.

    Raises:
        ValidationError: If delta > 0 or n is odd
    """
    if delta > 0:
        raise ValidationError(f"reflection positivity needs delta <= 0, got {delta}")
    if trials < 1:
        raise ValidationError(f"trials must be at least 1, got {trials}")
    h_rotated = rotated_hamiltonian(torus, delta)
    half = 1 << len(torus.half_split().left)
    values = []
    children = np.random.SeedSequence(seed).spawn(trials)
    for child in tqdm(children, desc="reflection positivity", disable=not progress, leave=False):
        raw = np.random.default_rng(child).uniform(-1.0, 1.0, size=(half, half))
        values.append(rp_expectation(torus, h_rotated, (raw + raw.T) / 2.0, beta))
    report = RpReport(values=values, slack=slack)
    if report.passed:
        logger.info(f"Reflection positivity: {trials} trials, minimum {report.minimum:.3e}")
    else:
        logger.warning(f"Reflection positivity failed in {report.failures} of {trials} trials")
    return report


def den_verify(torus: Torus, delta: float, beta: float, slack: float = SLACK) -> VerifyResult:
    """e^{-beta |E|/4} tr e^{-beta H} >= 1, compared in logs: 0 <= ln Z - beta |E| / 4."""
    if beta < 0:
        raise ValidationError(f"beta must be nonnegative, got {beta}")
    h = build_hamiltonian(torus, delta)
    log_den = log_partition_function(h, beta) - beta * torus.num_edges / 4.0
    return _check("den", 0.0, log_den, slack, d=torus.d, n=torus.n, delta=delta, beta=beta)
