"""Two-agent environment and MADDPG training."""

from .nets import MLP, AdaptiveStep, flatten_params, soft_update, unflatten_params
from .env import (
    AgentAction,
    ConjectureEnv,
    EnvContractError,
    EnvState,
    EpisodeLog,
    MarlConfig,
    ModelWiring,
    StepOutcome,
    StepRecord,
    episode_log_to_dict,
    episode_log_from_dict,
    model_wiring,
)
from .maddpg import (
    TrainedPolicies,
    execute,
    load_policies,
    save_policies,
    train,
)

__all__ = [
    "AdaptiveStep",
    "AgentAction",
    "ConjectureEnv",
    "EnvContractError",
    "EnvState",
    "EpisodeLog",
    "MLP",
    "MarlConfig",
    "ModelWiring",
    "StepOutcome",
    "StepRecord",
    "TrainedPolicies",
    "episode_log_from_dict",
    "episode_log_to_dict",
    "execute",
    "flatten_params",
    "load_policies",
    "model_wiring",
    "save_policies",
    "soft_update",
    "train",
    "unflatten_params",
]
