"""Six-vertex configurations, the row-to-row transfer matrix and exact sampling."""

from .configuration import (
    IceRuleReport,
    RowStructureReport,
    SINK_SOURCE_TYPES,
    SixVertexConfig,
    assemble_config,
    consistent_rows,
    enumerate_configs,
    log_weight,
    mask_to_spins,
    reflect_horizontal,
    reflect_vertical,
    row_structure_checks,
    sink_source_indicator,
    spins_to_mask,
    validate_config,
    vertex_type,
    vertex_types,
    weight,
)
from .sampling import sample_configs
from .transfer import (
    TopEigenpair,
    TransferOperator,
    apply_transfer,
    component_ratio_finite_t,
    delta_from_kappa,
    dense_transfer,
    efp_sixvertex,
    kappa_from_delta,
    sector_top_eigenvector,
    sector_transfer_block,
    sutherland_check,
    transfer_trace_power,
)

__all__ = [
    "IceRuleReport",
    "RowStructureReport",
    "SINK_SOURCE_TYPES",
    "SixVertexConfig",
    "TopEigenpair",
    "TransferOperator",
    "apply_transfer",
    "assemble_config",
    "component_ratio_finite_t",
    "consistent_rows",
    "delta_from_kappa",
    "dense_transfer",
    "efp_sixvertex",
    "enumerate_configs",
    "kappa_from_delta",
    "log_weight",
    "mask_to_spins",
    "reflect_horizontal",
    "reflect_vertical",
    "row_structure_checks",
    "sample_configs",
    "sector_top_eigenvector",
    "sector_transfer_block",
    "sink_source_indicator",
    "spins_to_mask",
    "sutherland_check",
    "transfer_trace_power",
    "validate_config",
    "vertex_type",
    "vertex_types",
    "weight",
]
