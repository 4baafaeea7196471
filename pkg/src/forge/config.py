"""Run configuration: one TOML document with a section per subsystem.

``load_config`` starts from the documented defaults and overlays the file;
unknown sections or keys are configuration errors.  The master seed can be
overridden through the ``FORGE_MASTER_SEED`` environment variable, which
takes precedence over both the file and command-line value.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .marl.env import MarlConfig
from .regression.config import RegressorConfig
from .surfaces.datapoints import SIZE_RANGES, UNION_PARTS, UNION_SIZE_RANGES

SEED_ENV_VAR = "FORGE_MASTER_SEED"


class ConfigError(ValueError):
    """The run-config file is malformed or inconsistent."""


@dataclass(frozen=True)
class SurfacesSection:
    per_class: int = 100
    sphere_points: tuple[int, int] = SIZE_RANGES["sphere"]
    grid_side: tuple[int, int] = SIZE_RANGES["torus"]
    union_sphere_points: tuple[int, int] = UNION_SIZE_RANGES["sphere"]
    union_grid_side: tuple[int, int] = UNION_SIZE_RANGES["torus"]
    union_parts: tuple[int, int] = UNION_PARTS


@dataclass(frozen=True)
class ProverSection:
    budget: int = 10_000


@dataclass(frozen=True)
class HarnessSection:
    per_class: int = 100
    eval_episodes: int = 15
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    resamples: int = 10_000
    concept_premises: str = "rank-nullity"       # or "experiment"
    concept_coefficient_mode: str = "integer"    # or "unit" / "any"


@dataclass(frozen=True)
class ExperimentSection:
    dataset: str = "D0"
    model: str = "M0"
    seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    surfaces: SurfacesSection = field(default_factory=SurfacesSection)
    regression: RegressorConfig = field(default_factory=RegressorConfig)
    prover: ProverSection = field(default_factory=ProverSection)
    marl: MarlConfig = field(default_factory=MarlConfig)
    harness: HarnessSection = field(default_factory=HarnessSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)

    def master_seed(self, fallback: int | None = None) -> int:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                return int(env)
            except ValueError as exc:
                raise ConfigError(f"{SEED_ENV_VAR} must be an integer") from exc
        if fallback is not None:
            return fallback
        return self.experiment.seed


_SECTIONS = {
    "surfaces": SurfacesSection,
    "regression": RegressorConfig,
    "prover": ProverSection,
    "marl": MarlConfig,
    "harness": HarnessSection,
    "experiment": ExperimentSection,
}


def _coerce(cls, payload: dict, section: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(payload) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {sorted(unknown)}")
    converted = {
        key: tuple(value) if isinstance(value, list) else value
        for key, value in payload.items()
    }
    try:
        return cls(**converted)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid [{section}] configuration: {exc}") from exc


def load_config(path=None) -> RunConfig:
    """Parse a TOML run-config file over the defaults; None gives defaults."""
    if path is None:
        return RunConfig()
    with open(path, "rb") as fh:
        try:
            payload = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    unknown = set(payload) - set(_SECTIONS) - {"suite"}
    if unknown:
        raise ConfigError(f"unknown section(s): {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        if name in payload:
            if not isinstance(payload[name], dict):
                raise ConfigError(f"[{name}] must be a table")
            kwargs[name] = _coerce(cls, payload[name], name)
    return RunConfig(**kwargs)


def load_suite(path) -> list[tuple[str, str]]:
    """The ablation cell list from a suite file.

    ``[suite] cells = [["D0", "M0"], ...]`` enumerates explicit cells;
    ``datasets``/``models`` lists expand to their cross product.
    """
    with open(path, "rb") as fh:
        payload = tomllib.load(fh)
    suite = payload.get("suite", {})
    if "cells" in suite:
        cells = [tuple(cell) for cell in suite["cells"]]
    else:
        datasets = suite.get("datasets", ["D0"])
        models = suite.get("models", ["OnlyCA", "M0", "M0Noise", "M1", "M2"])
        cells = [(d, m) for d in datasets for m in models]
    for cell in cells:
        if len(cell) != 2:
            raise ConfigError(f"suite cell {cell!r} must be [dataset, model]")
    return cells


def default_config_text() -> str:
    """The full run-config document with every default spelled out."""
    reg = RegressorConfig()
    marl = MarlConfig()
    return f"""\
# Run configuration; every value below is the default.

[surfaces]
per_class = 100                  # surfaces per class when generating datasets
sphere_points = [12, 48]         # sample-point range for spheres
grid_side = [4, 10]              # row/column range for torus and Klein grids
union_sphere_points = [8, 24]    # part sizes inside disjoint unions
union_grid_side = [3, 7]
union_parts = [2, 3]             # parts per disjoint union

[regression]
alpha = {reg.alpha}                      # accuracy sharpness in the data loss
population_size = {reg.population_size}
generations = {reg.generations}
tournament_size = {reg.tournament_size}
max_size = {reg.max_size}                    # statement node cap
max_depth = {reg.max_depth}
max_atom_size = {reg.max_atom_size}
max_atom_depth = {reg.max_atom_depth}
scaffold_population = {reg.scaffold_population}
scaffold_generations = {reg.scaffold_generations}
scaffold_depth = {reg.scaffold_depth}
const_lo = {reg.const_lo}
const_hi = {reg.const_hi}
crossover_prob = {reg.crossover_prob}
mutation_prob = {reg.mutation_prob}
const_perturb_prob = {reg.const_perturb_prob}
elitism = {reg.elitism}

[prover]
budget = 10000                   # decision-procedure step budget

[marl]
n_patches = {marl.n_patches}
lambda_init_fraction = {marl.lambda_init_fraction}
lambda_step = {marl.lambda_step}
prior_step = {marl.prior_step}
top_k = {marl.top_k}
block_size = {marl.block_size}
beta = {marl.beta}                      # length reward per node
beta_cap = {marl.beta_cap}
r_term = {marl.r_term}
gamma = {marl.gamma}
threshold = {marl.threshold}
noisy_threshold = {marl.noisy_threshold}
noise_sigma = {marl.noise_sigma}
max_steps = {marl.max_steps}
n_features_init = {marl.n_features_init}
prove_budget = {marl.prove_budget}
total_steps = {marl.total_steps}
buffer_size = {marl.buffer_size}
batch_size = {marl.batch_size}
tau = {marl.tau}
lr_critic = {marl.lr_critic}
lr_actor = {marl.lr_actor}
explore_sigma_start = {marl.explore_sigma_start}
explore_sigma_end = {marl.explore_sigma_end}
warmup_steps = {marl.warmup_steps}
eval_episodes = {marl.eval_episodes}

[harness]
per_class = 100
eval_episodes = 15
seeds = [0, 1, 2, 3, 4]
resamples = 10000
concept_premises = "rank-nullity"       # substitutions used by the detector
concept_coefficient_mode = "integer"    # integer | unit | any

[experiment]
dataset = "D0"
model = "M0"
seed = 0
"""
