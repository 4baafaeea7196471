"""Two-stage symbolic-regression search for candidate statements."""

from .config import PRIOR_KEYS, RegressorConfig
from .loss import ZeroWeightError, loss, prior_sum, weighted_accuracy
from .gp import (
    EvalCache,
    RegressionResult,
    run_conjecturer,
    scaffold,
    spot_features,
    union_patch,
)

__all__ = [
    "EvalCache",
    "PRIOR_KEYS",
    "RegressionResult",
    "RegressorConfig",
    "ZeroWeightError",
    "loss",
    "prior_sum",
    "run_conjecturer",
    "scaffold",
    "spot_features",
    "union_patch",
    "weighted_accuracy",
]
