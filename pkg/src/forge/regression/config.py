"""Regressor configuration and the prior vocabulary.

Priors are bounded real knobs, one per usage class.  A positive prior
lowers the loss of expressions whose class set includes that key, so it
encourages use; negative discourages.  The vocabulary is fixed:

- ``op:+ op:- op:* op:= op:and op:implies op:not``  (7 operator keys)
- ``feat:r1 ... feat:w2``                            (8 feature keys)
- ``length``       multiplies tree size (a per-node term)
- ``nested_not``   composition penalty for a negation under a negation
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..statements.ast import FEATURES

P_MAX = 2.0

PRIOR_KEYS: tuple[str, ...] = (
    "op:+",
    "op:-",
    "op:*",
    "op:=",
    "op:and",
    "op:implies",
    "op:not",
    *(f"feat:{name}" for name in FEATURES),
    "length",
    "nested_not",
)


@dataclass
class RegressorConfig:
    alpha: float = 4.0                    # accuracy sharpness
    priors: dict[str, float] = field(default_factory=dict)
    population_size: int = 128
    generations: int = 10
    tournament_size: int = 4
    max_size: int = 31                    # full statement node cap
    max_depth: int = 8
    seed: int = 0
    # Stage-specific knobs.
    max_atom_size: int = 9
    max_atom_depth: int = 5
    scaffold_population: int = 64
    scaffold_generations: int = 8
    scaffold_depth: int = 3               # connective levels above atoms
    const_lo: int = -4
    const_hi: int = 4
    crossover_prob: float = 0.6
    mutation_prob: float = 0.35           # remainder after crossover; then
    const_perturb_prob: float = 0.05      # constant perturbation
    elitism: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.alpha <= 6.5:
            raise ValueError("alpha must lie in (0, 6.5]")
        for key, value in self.priors.items():
            if key not in PRIOR_KEYS:
                raise ValueError(f"unknown prior key {key!r}")
            if abs(value) > P_MAX:
                raise ValueError(f"prior {key!r} outside [-{P_MAX}, {P_MAX}]")
        for name in ("population_size", "generations", "tournament_size",
                     "max_size", "max_depth", "max_atom_size",
                     "max_atom_depth", "scaffold_population",
                     "scaffold_generations"):
            if getattr(self, name) < 0 or (
                name in ("population_size", "tournament_size", "max_size",
                         "max_depth", "max_atom_size", "max_atom_depth",
                         "scaffold_population") and getattr(self, name) <= 0
            ):
                raise ValueError(f"{name} must be positive")
        if self.const_lo > self.const_hi:
            raise ValueError("empty constant range")

    def prior(self, key: str) -> float:
        return self.priors.get(key, 0.0)
