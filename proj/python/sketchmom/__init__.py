"""Sketch-and-project linear system solvers with momentum."""

from sketchmom._core import (
    Checkpoint,
    ComplexityRow,
    IterateTrace,
    LinearSystem,
    RateReport,
    accelerated_params,
    algebraic_connectivity,
    beta_max,
    cesaro_bound,
    gen_gaussian_system,
    gen_pd_system,
    gen_sparse_rows_system,
    gossip,
    measure_complexity_ratio,
    pinv_psd,
    project_onto_solution_set,
    rate_constants,
    run_experiment_json,
    sm_rate_constants,
    solve,
    spectrum,
)

__all__ = [
    "Checkpoint",
    "ComplexityRow",
    "IterateTrace",
    "LinearSystem",
    "RateReport",
    "accelerated_params",
    "algebraic_connectivity",
    "beta_max",
    "cesaro_bound",
    "gen_gaussian_system",
    "gen_pd_system",
    "gen_sparse_rows_system",
    "gossip",
    "measure_complexity_ratio",
    "pinv_psd",
    "project_onto_solution_set",
    "rate_constants",
    "run_experiment_json",
    "sm_rate_constants",
    "solve",
    "spectrum",
]
