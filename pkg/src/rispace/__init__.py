"""Norms in rearrangement-invariant spaces, logarithmic real interpolation,
and a monotone p-Laplacian solver for regularity experiments."""

from .rearrange import (
    DivergenceError,
    LogPowerWeight,
    SimpleFunction,
    StepFunction,
    distribution,
    integrate_weighted,
    maximal,
    rearrange,
)
from .spaces import (
    INF,
    RatioReport,
    SpaceSpec,
    SpecError,
    UnsupportedEmbedding,
    check_weight_conditions,
    embedding_registered,
    embedding_report,
    equivalence_report,
    inclusion_chains,
    space_norm,
)
from .interp import (
    CoupleSpec,
    HolderProfile,
    IdentificationUnsupported,
    InterpParams,
    ParameterError,
    b_sharp_quotient,
    holder_k_check,
    identification_json,
    identify_interp_space,
    k_functional,
    k_functional_grid,
    log_interp_norm,
    verify_identification,
)
from .plap import (
    ConvergenceError,
    GradientField,
    Grid,
    GridFunction,
    NotConverged,
    PotentialSpec,
    exponents,
    gradient_norm,
    monotonicity_check,
    solution_map_gradient,
    solve_weak,
    truncate,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    ExperimentReport,
    run_bound_check,
    run_holder_experiment,
    run_regularity_table,
)

__version__ = "0.1.0"
