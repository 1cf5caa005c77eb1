"""Bradley-Terry and divide-and-conquer ranking of paired comparisons."""

from ._crowdc import (
    CrowdcError,
    cost_formulas,
    emit_plots,
    fit_btl,
    generate_comparisons,
    kendall_tau,
    pivot_orders,
    rank_crowdc,
    run_sweep,
    simulate_btl,
    simulate_crowdc,
)

__all__ = [
    "CrowdcError",
    "cost_formulas",
    "emit_plots",
    "fit_btl",
    "generate_comparisons",
    "kendall_tau",
    "pivot_orders",
    "rank_crowdc",
    "run_sweep",
    "simulate_btl",
    "simulate_crowdc",
]
