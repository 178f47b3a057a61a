"""Data assimilation by Wasserstein-distance minimization.

Closed-form 2-Wasserstein distances on Gaussians (and Gaussian-to-point),
the measurement update that minimizes the posterior error's W2 distance to
zero error (recovering the classical Kalman gain), an exact discrete
transport oracle for validation, and a Monte Carlo filtering harness.
"""

from .assimilation import (
    LinearSensor,
    OptimizerSettings,
    PosteriorErrorModel,
    UpdateMaps,
    assimilate,
    kalman_gain,
    posterior_cov_constrained,
    posterior_cov_general,
    w2sq_objective,
    w2sq_objective_grad,
    wasserstein_optimal_gain_numeric,
)
from .errors import (
    DidNotConverge,
    DimMismatch,
    EigenFailure,
    NegativeRadicand,
    NonFinite,
    NotPsd,
    NotSymmetric,
    NumericalError,
    SingularInnovation,
    TooFewSamples,
    TooLarge,
    ValidationError,
    W2AssimError,
)
from .filtering import (
    McSummary,
    StepRecord,
    covariance_schedule,
    predict,
    records_to_csv,
    run_filter,
    run_monte_carlo,
)
from .gaussians import (
    DiracMass,
    Gaussian,
    SpdMatrix,
    empirical_moments,
    psd_factor,
    sample,
    spd_sqrt,
    validate_spd,
)
from .scenario import SCENARIO_FORMAT, Scenario
from .transport import (
    DiscreteMeasure,
    TransportPlan,
    discrete_w2,
    empirical_w2_gaussians,
)
from .verification import FIXED_PAIRS, CrosscheckRow, oracle_crosscheck
from .wasserstein import w2_gaussian, w2_gaussian_dirac, w2sq_dirac_trace_form

__version__ = "0.1.0"

__all__ = [
    "DiracMass",
    "DiscreteMeasure",
    "Gaussian",
    "LinearSensor",
    "McSummary",
    "OptimizerSettings",
    "PosteriorErrorModel",
    "Scenario",
    "SCENARIO_FORMAT",
    "SpdMatrix",
    "StepRecord",
    "TransportPlan",
    "UpdateMaps",
    "W2AssimError",
    "ValidationError",
    "NumericalError",
    "NonFinite",
    "NotSymmetric",
    "NotPsd",
    "DimMismatch",
    "TooFewSamples",
    "TooLarge",
    "EigenFailure",
    "NegativeRadicand",
    "SingularInnovation",
    "DidNotConverge",
    "CrosscheckRow",
    "FIXED_PAIRS",
    "assimilate",
    "covariance_schedule",
    "discrete_w2",
    "empirical_moments",
    "empirical_w2_gaussians",
    "kalman_gain",
    "oracle_crosscheck",
    "posterior_cov_constrained",
    "posterior_cov_general",
    "predict",
    "psd_factor",
    "records_to_csv",
    "run_filter",
    "run_monte_carlo",
    "sample",
    "spd_sqrt",
    "validate_spd",
    "w2_gaussian",
    "w2_gaussian_dirac",
    "w2sq_dirac_trace_form",
    "w2sq_objective",
    "w2sq_objective_grad",
    "wasserstein_optimal_gain_numeric",
]
