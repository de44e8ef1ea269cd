"""Closed-form bounds, operator-inequality verifiers and scaling fits."""

from .formulas import (
    BoundReport,
    boundary_volume_bound,
    boundary_volume_exact,
    chessboard_exponent,
    chessboard_exponent_2d,
    chessboard_report,
    combined_upper_bound,
    entropy_bound,
    num_bound,
    pf_lower_bound,
    pf_lower_bound_eta,
    tile_upper_bound,
    window_count,
    window_log_density,
)
from .scaling import ScalingFit, fit_scaling
from .verifiers import (
    RpReport,
    VerifyResult,
    chessboard_verify,
    den_verify,
    holder_verify,
    rotated_hamiltonian,
    rp_expectation,
    rp_verify,
)

__all__ = [
    "BoundReport",
    "RpReport",
    "ScalingFit",
    "VerifyResult",
    "boundary_volume_bound",
    "boundary_volume_exact",
    "chessboard_exponent",
    "chessboard_exponent_2d",
    "chessboard_report",
    "chessboard_verify",
    "combined_upper_bound",
    "den_verify",
    "entropy_bound",
    "fit_scaling",
    "holder_verify",
    "num_bound",
    "pf_lower_bound",
    "pf_lower_bound_eta",
    "rotated_hamiltonian",
    "rp_expectation",
    "rp_verify",
    "tile_upper_bound",
    "window_count",
    "window_log_density",
]
