"""validmap: learn where a predictive model is locally valid.

The package actively queries noisy error observations, models the residual
surface with an exact Gaussian process, represents the belief of the
limit-state value ``xi - |error|`` as a folded Gaussian, and places samples
where the probability of misclassifying validity is highest.
"""

from .acquisition import (
    CampaignConfig,
    CampaignResult,
    IterationRecord,
    RunHistory,
    psi_mis,
    psi_u,
    psi_u2,
    run_campaign,
    select_next,
    stopping_pmis,
)
from .bounds import (
    BoundInputs,
    covering_number,
    eta_bound,
    lipschitz_estimates,
    sigma_opt,
)
from .design import candidates, lhs, substream
from .domain import Dataset, Domain, ResidualOracle, ToleranceSpec, unit_domain
from .exceptions import (
    ConfigError,
    ConsistencyError,
    CoverageInfeasibleError,
    DomainError,
    EvaluationError,
    IllConditionedError,
    ParameterError,
    ValidmapError,
)
from .gp import (
    GpHyperparams,
    GpModel,
    PriorSpec,
    condition,
    fit,
    log_map_objective,
    model_from_json,
    model_to_json,
    predict,
    update,
)
from .kernels import (
    KernelSpec,
    KernelTerm,
    default_kernel,
    kernel_eval,
    kernel_lipschitz,
    matern52_kernel,
)
from .limitstate import (
    LimitStatePosterior,
    folded_cdf,
    folded_moments,
    folded_quantile,
    predict_valid,
    predict_valid_conf,
)

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "CampaignConfig",
    "CampaignResult",
    "ConfigError",
    "ConsistencyError",
    "CoverageInfeasibleError",
    "Dataset",
    "Domain",
    "DomainError",
    "EvaluationError",
    "GpHyperparams",
    "GpModel",
    "IllConditionedError",
    "IterationRecord",
    "KernelSpec",
    "KernelTerm",
    "LimitStatePosterior",
    "ParameterError",
    "PriorSpec",
    "ResidualOracle",
    "RunHistory",
    "ToleranceSpec",
    "ValidmapError",
    "candidates",
    "condition",
    "covering_number",
    "default_kernel",
    "eta_bound",
    "fit",
    "folded_cdf",
    "folded_moments",
    "folded_quantile",
    "kernel_eval",
    "kernel_lipschitz",
    "lhs",
    "lipschitz_estimates",
    "log_map_objective",
    "matern52_kernel",
    "model_from_json",
    "model_to_json",
    "predict",
    "predict_valid",
    "predict_valid_conf",
    "psi_mis",
    "psi_u",
    "psi_u2",
    "run_campaign",
    "select_next",
    "sigma_opt",
    "stopping_pmis",
    "substream",
    "unit_domain",
    "update",
]
