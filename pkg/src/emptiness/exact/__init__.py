"""Exact Hilbert-space operators, thermal states and sector ground states."""

from ..lattice.torus import SpinConfig
from .operators import (
    OperatorMatrix,
    SectorBasis,
    build_hamiltonian,
    diagonal_operator,
    frustration_free_residual,
    identity_operator,
    projector_contour,
    projector_q,
    restrict_to_sector,
    sector_basis,
    spin_operator,
    total_sz,
    uniform_superposition,
)
from .thermal import (
    GroundState,
    block_weight,
    commutator_norm,
    efp_ground_sector,
    efp_thermal,
    full_spectrum,
    kernel_element,
    log_partition_function,
    sector_ground_state,
    sector_spectra,
    spectral_blocks,
    thermal_expectation,
    thermal_traces,
)

__all__ = [
    "GroundState",
    "OperatorMatrix",
    "SectorBasis",
    "SpinConfig",
    "block_weight",
    "build_hamiltonian",
    "commutator_norm",
    "diagonal_operator",
    "efp_ground_sector",
    "efp_thermal",
    "frustration_free_residual",
    "full_spectrum",
    "identity_operator",
    "kernel_element",
    "log_partition_function",
    "projector_contour",
    "projector_q",
    "restrict_to_sector",
    "sector_basis",
    "sector_ground_state",
    "sector_spectra",
    "spectral_blocks",
    "spin_operator",
    "thermal_expectation",
    "thermal_traces",
    "total_sz",
    "uniform_superposition",
]
