"""Minimal s,log^t-energy configurations, best packings and their s-dependence."""
from .analysis import (
    CircleReport,
    ClusterTrace,
    HypothesisNotCovered,
    LimitRow,
    ProbeReport,
    SolverFailure,
    SweepRecord,
    circle_optimality_check,
    cluster_probe,
    derivative_probe,
    infinity_limit_probe,
    sweep_g,
)
from .configurations import Configuration, config_distance, matched_distance, separation, signature
from .energy import EnergyValue, energy, log_lower_bound, lower_bound, sandwich_check
from .kernels import (
    DomainError,
    KernelParams,
    h_eval,
    k2_chord,
    k2_geodesic,
    kernel_eval,
    log_kernel_eval,
    p_eval,
    q_chord,
)
from .optimizer import PackingResult, SolveOptions, SolveResult, best_packing, maximin_polish, minimize_energy
from .oracle import BudgetExceeded, GridBudget, GridComparison, compare_with_grid, grid_minimize, grid_pack
from .spaces import (
    CircleSpace,
    FiniteSpace,
    MetricSpace,
    SegmentSpace,
    SpaceError,
    SphereSpace,
    discretize,
    equally_spaced,
    load_distance_csv,
    make_circle,
    make_finite,
    make_segment,
    make_sphere,
)

__version__ = "0.1.0"
