"""The provability score: a sound, budget-limited decision procedure.

``prove`` certifies a statement over the domain of nonnegative-integer
feature assignments satisfying the premise set plus the structural facts
(rank-nullity for both maps, rank bounded by height and width, and the
shared edge count w1 = h2, which canonicalization already identifies).

The procedure enumerates truth assignments over the statement's atoms
(propositional case split), and refutes each falsifying world by exact
linear arithmetic: a rational contradiction in the equality span, a pinned
variable forced negative or fractional, a structural bound forced to fail,
or a disequality whose functional the span forces to zero.  Disequalities
and nonlinear atoms are otherwise handled only by bounded counterexample
search, so the procedure is deliberately incomplete: score 1 means
certified, score 0 means refuted or out of budget.  Soundness is the
invariant that matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import rng as _rng
from ..statements.ast import And, Equals, Implies, Node, Not, render
from ..statements.canonical import (
    CANON_FEATURES,
    AtomicFormula,
    atomic_formulae,
)
from ..statements.evaluate import evaluate, evaluate_batch
from .linear import AffineSystem
from .premises import LinearEquality, PremiseConsistencyError, PremiseSet

_IDX = {name: i for i, name in enumerate(CANON_FEATURES)}

#: rank-nullity is structural: it holds for every feature assignment in the
#: domain whether or not the running premise set names it.
_STRUCTURAL = (
    ((1, 0, 1, 0, 0, -1, 0), 0, "rank-nullity-1"),
    ((0, 1, 0, 1, 0, 0, -1), 0, "rank-nullity-2"),
)

#: Nonnegative functionals forced by rank <= min(height, width).
_BOUND_FUNCTIONALS = (
    ({"h1": 1, "r1": -1}, "rank(d1) <= height(d1)"),
    ({"w1": 1, "r1": -1}, "rank(d1) <= width(d1)"),
    ({"w1": 1, "r2": -1}, "rank(d2) <= height(d2)"),
    ({"w2": 1, "r2": -1}, "rank(d2) <= width(d2)"),
)

SEARCH_BOX = 24          # counterexample search domain: 0 <= value <= 24
_MAX_CASE_ATOMS = 12     # propositional case splits are capped at 2**12

#: Structurally feasible feature patterns tried first in refutation search;
#: shaped like small spheres, tori, a Klein bottle, and unions.
_TEMPLATES = (
    {"h1": 4, "w1": 6, "w2": 4, "r1": 3, "r2": 3},
    {"h1": 6, "w1": 12, "w2": 8, "r1": 5, "r2": 7},
    {"h1": 7, "w1": 21, "w2": 14, "r1": 6, "r2": 13},
    {"h1": 5, "w1": 15, "w2": 10, "r1": 4, "r2": 9},
    {"h1": 6, "w1": 18, "w2": 12, "r1": 5, "r2": 12},
    {"h1": 8, "w1": 12, "w2": 8, "r1": 6, "r2": 6},
    {"h1": 9, "w1": 21, "w2": 14, "r1": 7, "r2": 12},
    {"h1": 11, "w1": 24, "w2": 16, "r1": 9, "r2": 13},
)


class BudgetError(ValueError):
    """The step budget must be positive."""


@dataclass
class ProofOutcome:
    rho: float
    certificate: dict | None = None
    counterexample: dict[str, int] | None = None


def _prop_value(node: Node, truth: dict) -> bool:
    if isinstance(node, Equals):
        return truth[id(node)]
    if isinstance(node, Not):
        return not _prop_value(node.child, truth)
    if isinstance(node, And):
        return _prop_value(node.left, truth) and _prop_value(node.right, truth)
    if isinstance(node, Implies):
        return (not _prop_value(node.left, truth)) or _prop_value(node.right, truth)
    raise TypeError(f"not a Boolean node: {node!r}")


class _AtomIndex:
    """Canonical atom classes across the statement and premise statements.

    Two syntactically different atoms with one canonical form share a truth
    variable; repeated occurrences of a shared subtree bind through their
    node identity.
    """

    def __init__(self, statements: list[Node]) -> None:
        self.classes: list[AtomicFormula] = []
        self.key_to_slot: dict[tuple, int] = {}
        self.node_slot: dict[int, int] = {}
        for stmt in statements:
            for atom in atomic_formulae(stmt):
                key = atom.canonical.key()
                slot = self.key_to_slot.get(key)
                if slot is None:
                    slot = len(self.classes)
                    self.key_to_slot[key] = slot
                    self.classes.append(atom)
                self.node_slot[id(atom.node)] = slot

    def prop_eval(self, stmt: Node, bits: tuple[bool, ...]) -> bool:
        binding = {
            node_id: bits[slot] for node_id, slot in self.node_slot.items()
        }
        return _prop_value(stmt, binding)


def _base_system(premises: PremiseSet) -> AffineSystem:
    system = AffineSystem()
    for coeffs, const, tag in _STRUCTURAL:
        system.add(coeffs, const, tag)
    for eq in premises.equalities:
        system.add(eq.coeffs, eq.constant, eq.name or str(eq))
    return system


def _refute_world(system: AffineSystem, false_linear) -> dict | None:
    """A soundness certificate that the world is infeasible, or None."""
    if system.contradiction is not None:
        return {"reason": "equality-contradiction",
                "combination": _combo(system.contradiction)}
    for var, value in system.pinned_variables().items():
        if value.denominator != 1:
            return {"reason": "pinned-fractional",
                    "variable": CANON_FEATURES[var], "value": str(value)}
        if value < 0:
            return {"reason": "pinned-negative",
                    "variable": CANON_FEATURES[var], "value": str(value)}
    for entries, label in _BOUND_FUNCTIONALS:
        coeffs = [0] * len(CANON_FEATURES)
        for feat, c in entries.items():
            coeffs[_IDX[feat]] = c
        forced = system.forced_value(coeffs, 0)
        if forced is not None and forced[0] < 0:
            return {"reason": "bound-violation", "bound": label,
                    "value": str(forced[0])}
    for form in false_linear:
        forced = system.forced_value(form.linear, form.constant)
        if forced is not None and forced[0] == 0:
            return {"reason": "forced-equality",
                    "functional": str(form),
                    "combination": _combo(forced[1])}
    return None


def _combo(combo: dict) -> dict:
    return {str(tag): str(val) for tag, val in sorted(combo.items(), key=lambda t: str(t[0]))}


def prove(statement: Node, premises: PremiseSet, budget: int = 10_000) -> ProofOutcome:
    """Provability score with certificate or counterexample when available."""
    if budget <= 0:
        raise BudgetError("prove needs a positive step budget")
    if not premises.is_consistent():
        raise PremiseConsistencyError("premise set admits no assignment")

    # Harvested whole-formula premises join the case split only while the
    # total atom count stays within the split budget (insertion order,
    # greedy).  Dropping a premise is sound: it only makes proving harder.
    keys = {a.canonical.key() for a in atomic_formulae(statement)}
    kept_premises: list[Node] = []
    for harvested in premises.harvested_statements:
        extra = {a.canonical.key() for a in atomic_formulae(harvested)}
        if len(keys | extra) <= _MAX_CASE_ATOMS:
            keys |= extra
            kept_premises.append(harvested)
    index = _AtomIndex([statement, *kept_premises])
    atoms = index.classes
    k = len(atoms)
    steps = 0
    open_worlds = False
    refutations: list[dict] = []

    if k <= _MAX_CASE_ATOMS and (1 << k) <= budget:
        base = _base_system(premises)
        for mask in range(1 << k):
            if steps >= budget:
                return ProofOutcome(0.0)
            steps += 1
            bits = tuple(bool(mask >> i & 1) for i in range(k))
            if index.prop_eval(statement, bits):
                continue
            if any(not index.prop_eval(h, bits) for h in kept_premises):
                continue  # the premises exclude this world
            system = base.copy()
            false_linear = []
            for slot, atom in enumerate(atoms):
                form = atom.canonical
                if not form.is_linear:
                    continue  # sound relaxation: drop nonlinear constraints
                if bits[slot]:
                    system.add(form.linear, form.constant, f"atom:{form}")
                else:
                    false_linear.append(form)
            cert = _refute_world(system, false_linear)
            if cert is None:
                open_worlds = True
            else:
                cert["world"] = "".join("1" if b else "0" for b in bits)
                refutations.append(cert)
        if not open_worlds:
            return ProofOutcome(
                1.0, certificate={"kind": "case-analysis", "worlds": refutations}
            )
    counterexample = _search_counterexample(
        statement, premises, budget - steps
    )
    if counterexample is not None:
        return ProofOutcome(0.0, counterexample=counterexample)
    return ProofOutcome(0.0)


# --------------------------------------------------------------------------
# Bounded counterexample search

def _assignment_features(values: dict[str, int]) -> tuple[int, ...]:
    return (
        values["r1"], values["r2"], values["n1"], values["n2"],
        values["h1"], values["w1"], values["w1"], values["w2"],
    )


def _feasible(values: dict[str, int], premises: PremiseSet) -> bool:
    if any(v < 0 or v > SEARCH_BOX for v in values.values()):
        return False
    if values["r1"] + values["n1"] != values["w1"]:
        return False
    if values["r2"] + values["n2"] != values["w2"]:
        return False
    if values["r1"] > min(values["h1"], values["w1"]):
        return False
    if values["r2"] > min(values["w1"], values["w2"]):
        return False
    features = _assignment_features(values)
    for eq in premises.equalities:
        if not eq.holds(features):
            return False
    for stmt in premises.harvested_statements:
        if not evaluate(stmt, features):
            return False
    return True


_MAX_SEARCH_SAMPLES = 2500


def _search_counterexample(
    statement: Node, premises: PremiseSet, budget: int
) -> dict[str, int] | None:
    if budget <= 0:
        return None
    # Witnesses inside the box are dense when they exist at all; after a
    # few thousand misses the remaining budget is better spent elsewhere.
    budget = min(budget, _MAX_SEARCH_SAMPLES + len(_TEMPLATES))
    steps = 0
    for template in _TEMPLATES:
        steps += 1
        values = _complete_template(template)
        if _feasible(values, premises):
            features = _assignment_features(values)
            if not evaluate(statement, features):
                return _with_h2(values)
        if steps >= budget:
            return None

    system = _base_system(premises)
    if system.contradiction is not None:
        return None
    rows, free = system.solve_parametric()
    gen = _rng.generator(_rng.derive_seed(0, render(statement)), "refute")
    while steps < budget:
        steps += 1
        values = {name: 0 for name in CANON_FEATURES}
        for idx in free:
            values[CANON_FEATURES[idx]] = int(gen.integers(0, SEARCH_BOX + 1))
        ok = True
        for pivot, terms, const in rows:
            total = -Fraction(const)
            for idx, coeff in terms:
                total -= coeff * values[CANON_FEATURES[idx]]
            if total.denominator != 1 or not 0 <= total <= SEARCH_BOX:
                ok = False
                break
            values[CANON_FEATURES[pivot]] = int(total)
        if not ok:
            continue
        if _feasible(values, premises):
            features = _assignment_features(values)
            if not evaluate(statement, features):
                return _with_h2(values)
    return None


def _complete_template(template: dict[str, int]) -> dict[str, int]:
    values = dict(template)
    values["n1"] = values["w1"] - values["r1"]
    values["n2"] = values["w2"] - values["r2"]
    return values


def _with_h2(values: dict[str, int]) -> dict[str, int]:
    out = {name: int(values[name]) for name in CANON_FEATURES}
    out["h2"] = out["w1"]
    return out


# --------------------------------------------------------------------------
# Non-degeneracy checks and premise harvesting

def nondegeneracy(
    statement: Node,
    data,
    premises: PremiseSet,
    seen_terminal=(),
    check_universal: bool = True,
    check_tautology: bool = True,
    check_duplicate: bool = True,
    feature_matrix: np.ndarray | None = None,
):
    """(pass, harvest): reject degenerate statements before any reward.

    A statement fails when any of its atomic formulae is true on every
    datapoint (those atoms are returned for harvesting into the premises),
    when it is a propositional tautology over its atoms, or when it
    canonically duplicates a premise, a harvested premise, or a previously
    terminal statement.
    """
    if feature_matrix is None:
        from ..surfaces.datapoints import feature_matrix as fmat

        feature_matrix = data if isinstance(data, np.ndarray) else fmat(data)
    if feature_matrix.shape[0] == 0:
        raise ValueError("nondegeneracy needs a nonempty dataset")

    atoms = atomic_formulae(statement)
    harvest: list[AtomicFormula] = []
    failed = False

    if check_tautology and _is_tautology(statement):
        return False, None

    if check_duplicate:
        text = render(statement)
        if text in set(seen_terminal):
            return False, None
        if any(render(h) == text for h in premises.harvested_statements):
            return False, None
        if len(atoms) == 1 and isinstance(statement, Equals):
            if atoms[0].canonical.key() in premises.equality_keys():
                return False, None

    if check_universal:
        seen_keys = set()
        for atom in atoms:
            key = atom.canonical.key()
            if key in seen_keys:
                continue
            seen_keys.add(key)
            if atom.canonical.is_trivially_true or atom.canonical.is_trivially_false:
                failed = True  # degenerate atom, nothing worth harvesting
                continue
            if bool(evaluate_batch(atom.node, feature_matrix).all()):
                failed = True
                harvest.append(atom)
    if failed:
        return False, (harvest or None)
    return True, None


def _is_tautology(statement: Node) -> bool:
    index = _AtomIndex([statement])
    k = len(index.classes)
    if k > _MAX_CASE_ATOMS:
        return False
    return all(
        index.prop_eval(statement, tuple(bool(m >> i & 1) for i in range(k)))
        for m in range(1 << k)
    )


def apply_harvest(
    premises: PremiseSet,
    statement: Node,
    data,
    harvest: list[AtomicFormula] | None,
    feature_matrix: np.ndarray | None = None,
) -> PremiseSet:
    """Fold a failed statement's universal facts into the premise set.

    Universal linear atoms strengthen the equality span; universal
    nonlinear atoms and the statement itself (when it holds on all of the
    data) are kept as whole-formula premises, which makes any repeat of
    the statement provable outright.
    """
    out = premises
    for atom in harvest or ():
        if atom.canonical.is_linear:
            out = out.with_equalities(
                [LinearEquality.from_canonical(atom.canonical)]
            )
        else:
            out = out.with_statement(atom.node)
    if feature_matrix is None:
        from ..surfaces.datapoints import feature_matrix as fmat

        feature_matrix = data if isinstance(data, np.ndarray) else fmat(data)
    if bool(evaluate_batch(statement, feature_matrix).all()):
        already = {render(h) for h in out.harvested_statements}
        if render(statement) not in already:
            out = out.with_statement(statement)
    return out


def noisy_rho(outcome: ProofOutcome, sigma: float, seed: int) -> float:
    """The score with seeded Gaussian noise; sigma = 0 returns it unchanged."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return float(outcome.rho)
    gen = _rng.generator(seed, "rho-noise")
    return float(outcome.rho + sigma * gen.standard_normal())
