"""Max-min capacity design of non-uniform Tx/Rx arrays for line-of-sight MIMO."""

from losarray.channel import (
    ChannelStack,
    LinkScenario,
    PowerNorm,
    SelectionWeights,
    build_channel,
    capacity_gradient,
    capacity_relaxed,
    capacity_selected,
    min_capacity,
    quantize_range,
    wavelength,
)
from losarray.exhaustive import EsBudget, EsBudgetExceeded, es_search
from losarray.geometry import ArrayLayout, Geometry, GridSpec, aperture, candidate_count, generate_grid, min_spacing
from losarray.rounding import BinarySelection, discrete_objective, round_top_k, selection_to_layout, swap_search
from losarray.solver import SolverConfig, SolverTrace, project_capped_simplex, softmin_objective, solve_alternating, solve_inner
from losarray.uniform import build_ula, ula_spacing

__version__ = "0.1.0"

__all__ = [
    "ArrayLayout", "BinarySelection", "ChannelStack", "EsBudget", "EsBudgetExceeded", "Geometry", "GridSpec",
    "LinkScenario", "PowerNorm", "SelectionWeights", "SolverConfig", "SolverTrace",
    "aperture", "build_channel", "build_ula", "candidate_count", "capacity_gradient", "capacity_relaxed",
    "capacity_selected", "discrete_objective", "es_search", "generate_grid", "min_capacity", "min_spacing",
    "project_capped_simplex", "quantize_range", "round_top_k", "selection_to_layout", "softmin_objective",
    "solve_alternating", "solve_inner", "swap_search", "ula_spacing", "wavelength",
]
