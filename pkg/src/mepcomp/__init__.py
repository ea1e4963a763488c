"""Variance-competitive estimators for monotone estimation problems under threshold sampling."""

from .bounds import (
    BoundsRow,
    bounds_row,
    power_alphal_estimate,
    power_alphal_ratio,
    power_opt_square,
    universal_upper,
    worstcase_lower,
)
from .estimators import (
    AlphaLForm,
    EstimatorTable,
    alpha_l_estimator,
    alpha_l_truncated,
    evaluate,
    max_ratio,
    ratio,
    square_expectation_alphal,
    unbiasedness_check,
)
from .hull import (
    HullSegments,
    lambda_bounds,
    lambda_point,
    lower_hull,
    opt_square,
    optimal_completion_square,
    v_optimal_estimator,
)
from .instance import (
    MepInstance,
    SeedPartition,
    StepFn,
    build_instance,
    check_estimable,
    family_instance,
    lower_bound_fn,
)
from .optsearch import FeasibilityOutcome, OptimalResult, feasible_estimator, optimal_ratio, sweep_optimal

__version__ = "0.1.0"
