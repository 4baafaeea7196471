"""Premise sets: linear-equality facts plus harvested universal truths.

The named groups are

- ``P0``  rank-nullity for both maps: r1 + n1 = w1 and r2 + n2 = w2
- ``P1``  connectedness: h1 - r1 = 1
- ``P2``  orientability: n2 = 1

and each dataset pairs with a fixed selection (D0 with all three, D1 with
P0 and P1, D2 and D3 with P0 alone).  The edge-count identity w1 = h2 is
structural and baked into canonical forms, so it never appears explicitly.

Harvesting may add two kinds of facts at runtime: single linear equalities
(they join the linear span the prover eliminates against) and whole
statements (used as propositional constraints).  Both must hold on every
datapoint of the running dataset, which ``check_against_data`` verifies.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..statements.ast import Node
from ..statements.canonical import CANON_FEATURES, CanonicalForm
from ..statements.evaluate import evaluate


class PremiseConsistencyError(ValueError):
    """The premise equalities admit no feasible assignment."""


@dataclass(frozen=True)
class LinearEquality:
    """coeffs . x + constant = 0 over CANON_FEATURES."""

    coeffs: tuple[int, ...]
    constant: int
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(CANON_FEATURES):
            raise ValueError("coefficient vector must span the canonical features")

    @classmethod
    def from_canonical(cls, form: CanonicalForm, name: str = "") -> "LinearEquality":
        if not form.is_linear:
            raise ValueError("only linear atoms can become premise equalities")
        return cls(form.linear, form.constant, name)

    def canonical(self) -> CanonicalForm:
        return CanonicalForm(self.coeffs, self.constant, ())

    def holds(self, features) -> bool:
        return self.canonical().holds(features)

    def __str__(self) -> str:
        return str(self.canonical())


def _vec(entries: dict[str, int], constant: int, name: str) -> LinearEquality:
    coeffs = [0] * len(CANON_FEATURES)
    for feat, c in entries.items():
        coeffs[CANON_FEATURES.index(feat)] = c
    return LinearEquality(tuple(coeffs), constant, name)


_GROUPS = {
    "P0": (
        _vec({"r1": 1, "n1": 1, "w1": -1}, 0, "p1"),
        _vec({"r2": 1, "n2": 1, "w2": -1}, 0, "p2"),
    ),
    "P1": (_vec({"h1": 1, "r1": -1}, -1, "p3"),),
    "P2": (_vec({"n2": 1}, -1, "p4"),),
}

DATASET_PREMISES = {
    "D0": ("P0", "P1", "P2"),
    "D1": ("P0", "P1"),
    "D2": ("P0",),
    "D3": ("P0",),
}


def premise_group(name: str) -> tuple[LinearEquality, ...]:
    if name not in _GROUPS:
        raise ValueError(f"unknown premise group {name!r}")
    return _GROUPS[name]


@dataclass(frozen=True)
class PremiseSet:
    equalities: tuple[LinearEquality, ...] = ()
    harvested_statements: tuple[Node, ...] = ()
    label: str = ""

    @classmethod
    def from_groups(cls, *names: str) -> "PremiseSet":
        eqs: list[LinearEquality] = []
        for name in names:
            eqs.extend(premise_group(name))
        return cls(tuple(eqs), (), "+".join(names))

    def linear_functionals(self) -> list[tuple[int, ...]]:
        return [eq.coeffs for eq in self.equalities]

    def equality_keys(self) -> set[tuple]:
        return {eq.canonical().key() for eq in self.equalities}

    def with_equalities(self, new: list[LinearEquality]) -> "PremiseSet":
        known = self.equality_keys()
        added = tuple(
            eq for eq in new if eq.canonical().key() not in known
        )
        return replace(self, equalities=self.equalities + added)

    def with_statement(self, statement: Node) -> "PremiseSet":
        return replace(
            self, harvested_statements=self.harvested_statements + (statement,)
        )

    def is_consistent(self) -> bool:
        """Rational feasibility of the equalities (a cheap necessary check)."""
        from .linear import AffineSystem

        system = AffineSystem()
        for i, eq in enumerate(self.equalities):
            system.add(eq.coeffs, eq.constant, i)
        return not system.contradiction

    def check_against_data(self, data) -> None:
        """Every equality and harvested statement must hold on every datapoint."""
        for eq in self.equalities:
            for dp in data:
                if not eq.holds(dp):
                    raise PremiseConsistencyError(
                        f"premise {eq} fails on a {dp.kind} datapoint"
                    )
        for stmt in self.harvested_statements:
            for dp in data:
                if not evaluate(stmt, dp):
                    raise PremiseConsistencyError(
                        "harvested premise fails on the dataset"
                    )


def premises_for_dataset(dataset_id: str) -> PremiseSet:
    if dataset_id not in DATASET_PREMISES:
        raise ValueError(f"unknown dataset {dataset_id!r}")
    return PremiseSet.from_groups(*DATASET_PREMISES[dataset_id])
