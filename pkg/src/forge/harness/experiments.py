"""Experiment specifications and model wiring.

A specification names a dataset (D0..D3), a model variant, class balance,
and the seed list.  Datasets pair with fixed premise sets; the pairing is
not configurable, and a spec that tries to break it fails fast.  Concept
detection for metrics defaults to rank-nullity substitutions only, which
keeps the alternating-sum and middle-Betti readings distinguishable even
when connectedness and orientability are premises of the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..marl.env import ModelWiring, model_wiring
from ..prover.premises import DATASET_PREMISES, PremiseSet, premises_for_dataset
from ..surfaces.datapoints import DATASET_CLASSES, build_dataset


class ExperimentConfigError(ValueError):
    """The experiment specification violates a documented constraint."""


@dataclass(frozen=True)
class ExperimentSpec:
    dataset_id: str
    model: str
    per_class: int = 100
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    training_steps: int | None = None      # None: the marl config decides
    eval_episodes: int = 15

    def __post_init__(self) -> None:
        if self.dataset_id not in DATASET_CLASSES:
            raise ExperimentConfigError(f"unknown dataset {self.dataset_id!r}")
        try:
            model_wiring(self.model)
        except ValueError as exc:
            raise ExperimentConfigError(str(exc)) from exc
        if not 50 <= self.per_class <= 200:
            raise ExperimentConfigError("per_class must lie in 50..200")
        if not self.seeds:
            raise ExperimentConfigError("at least one seed is required")
        if self.eval_episodes < 1:
            raise ExperimentConfigError("eval_episodes must be positive")
        if self.training_steps is not None and self.training_steps < 0:
            raise ExperimentConfigError("training_steps must be nonnegative")

    @property
    def cell_id(self) -> str:
        return f"{self.dataset_id}_{self.model}"


def build_experiment(spec: ExperimentSpec, data_seed: int):
    """(datapoints, premises, wiring) for a specification.

    The premise set follows the dataset pairing and is verified against
    the generated data; the wiring selects the ablation variant.
    """
    data = build_dataset(spec.dataset_id, spec.per_class, data_seed)
    premises = premises_for_dataset(spec.dataset_id)
    premises.check_against_data(data)
    wiring = model_wiring(spec.model)
    return data, premises, wiring


def concept_premises_for(dataset_id: str, mode: str = "rank-nullity") -> PremiseSet:
    """The substitution set the concept detector uses for metrics."""
    if mode == "rank-nullity":
        return PremiseSet.from_groups("P0")
    if mode == "experiment":
        return PremiseSet.from_groups(*DATASET_PREMISES[dataset_id])
    raise ExperimentConfigError(f"unknown concept premise mode {mode!r}")
