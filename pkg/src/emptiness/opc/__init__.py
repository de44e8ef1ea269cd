"""Osculating-path view of six-vertex configurations and its plaquette dynamics."""

from .moves import (
    C_MINUS,
    C_PLUS,
    AlignedRunReport,
    BlockadeReport,
    HeightRecord,
    aligned_run_detector,
    aligned_run_rate,
    apply_move,
    blockade_check,
    flippable_plaquettes,
    height,
    highest_opc,
    plaquette_type,
    raise_randomly,
    random_fixture,
)
from .paths import (
    OscPathConfig,
    from_opc,
    from_polylines,
    rectangle_from_spins,
    rectangle_spins,
    render_ascii,
    require_valid_opc,
    subrectangle,
    to_opc,
    trace_paths,
    validate_opc,
)

__all__ = [
    "AlignedRunReport",
    "BlockadeReport",
    "C_MINUS",
    "C_PLUS",
    "HeightRecord",
    "OscPathConfig",
    "aligned_run_detector",
    "aligned_run_rate",
    "apply_move",
    "blockade_check",
    "flippable_plaquettes",
    "from_opc",
    "from_polylines",
    "height",
    "highest_opc",
    "plaquette_type",
    "raise_randomly",
    "random_fixture",
    "rectangle_from_spins",
    "rectangle_spins",
    "render_ascii",
    "require_valid_opc",
    "subrectangle",
    "to_opc",
    "trace_paths",
    "validate_opc",
]
