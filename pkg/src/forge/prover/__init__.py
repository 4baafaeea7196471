"""Provability scoring over linear-arithmetic premise sets."""

from .premises import (
    DATASET_PREMISES,
    LinearEquality,
    PremiseConsistencyError,
    PremiseSet,
    premise_group,
    premises_for_dataset,
)
from .prove import (
    BudgetError,
    ProofOutcome,
    noisy_rho,
    nondegeneracy,
    prove,
)
from .lean import export_lean, lean_file_name

__all__ = [
    "BudgetError",
    "DATASET_PREMISES",
    "LinearEquality",
    "PremiseConsistencyError",
    "PremiseSet",
    "ProofOutcome",
    "export_lean",
    "lean_file_name",
    "noisy_rho",
    "nondegeneracy",
    "premise_group",
    "premises_for_dataset",
    "prove",
]
