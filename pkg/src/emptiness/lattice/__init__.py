"""Torus geometry, blocks, spin configurations and the universal contour."""

from .torus import (
    Block,
    HalfSplit,
    SpinConfig,
    Torus,
    boundary_layer,
    build_torus,
    contour_block_index,
    contour_interfaces,
    universal_contour,
)

__all__ = [
    "Block",
    "HalfSplit",
    "SpinConfig",
    "Torus",
    "boundary_layer",
    "build_torus",
    "contour_block_index",
    "contour_interfaces",
    "universal_contour",
]
