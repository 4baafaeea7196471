"""Lean 4 source export for statements and their premise sets.

The emitted file is self-contained text: a fixed header declaring three
modules over a division ring and the two linear maps between them, one
hypothesis per premise, the statement as the goal over integer-valued
feature symbols (universal quantification is implicit in the binder list),
and a proof stub invoking algebra tactics.  Emission is a pure function of
(statement, premises): identical inputs give identical bytes.

Syntax mapping: ``+ - *`` pass through, ``=`` stays ``=``, a negated
equality becomes ``≠``, conjunction ``∧``, implication ``→``,
other negations ``¬``.  Feature symbols keep their names and are typed
as integers so that subtraction is untruncated.
"""

from __future__ import annotations

import hashlib

from ..statements.ast import (
    And,
    Arith,
    Const,
    Equals,
    Feature,
    FEATURES,
    Implies,
    Node,
    Not,
    render,
)
from ..statements.canonical import CANON_FEATURES
from .premises import LinearEquality, PremiseSet

_HEADER = """\
import Mathlib

/- Chain-complex setting: V0, V1 and V2 are modules over a division ring R,
   with linear maps D1 : V1 -> V0 and D2 : V2 -> V1.  The integer symbols
   below stand for the ranks, nullities and dimensions of these maps:
   r1 = rank D1, r2 = rank D2, n1 and n2 the nullities, h1 = dim V0,
   w1 = h2 = dim V1, w2 = dim V2. -/
variable (R : Type*) [DivisionRing R]
variable (V0 V1 V2 : Type*)
variable [AddCommGroup V0] [Module R V0]
variable [AddCommGroup V1] [Module R V1]
variable [AddCommGroup V2] [Module R V2]
variable (D1 : V1 →ₗ[R] V0) (D2 : V2 →ₗ[R] V1)
"""


def _lean_arith(node: Node) -> str:
    if isinstance(node, Feature):
        return node.name
    if isinstance(node, Const):
        return str(node.value) if node.value >= 0 else f"({node.value})"
    if isinstance(node, Arith):
        return f"({_lean_arith(node.left)} {node.op} {_lean_arith(node.right)})"
    raise TypeError(f"not arithmetic: {node!r}")


def _lean_goal(node: Node) -> str:
    if isinstance(node, Equals):
        return f"{_lean_arith(node.left)} = {_lean_arith(node.right)}"
    if isinstance(node, Not):
        if isinstance(node.child, Equals):
            eq = node.child
            return f"{_lean_arith(eq.left)} ≠ {_lean_arith(eq.right)}"
        return f"¬ ({_lean_goal(node.child)})"
    if isinstance(node, And):
        return f"({_lean_goal(node.left)}) ∧ ({_lean_goal(node.right)})"
    if isinstance(node, Implies):
        return f"({_lean_goal(node.left)}) → ({_lean_goal(node.right)})"
    raise TypeError(f"not Boolean: {node!r}")


def _lean_equality(eq: LinearEquality) -> str:
    left: list[str] = []
    right: list[str] = []
    for coeff, name in zip(eq.coeffs, CANON_FEATURES):
        if coeff > 0:
            left.append(name if coeff == 1 else f"{coeff} * {name}")
        elif coeff < 0:
            right.append(name if coeff == -1 else f"{-coeff} * {name}")
    if eq.constant > 0:
        left.append(str(eq.constant))
    elif eq.constant < 0:
        right.append(str(-eq.constant))
    lhs = " + ".join(left) if left else "0"
    rhs = " + ".join(right) if right else "0"
    return f"{lhs} = {rhs}"


def statement_hash(statement: Node, premises: PremiseSet) -> str:
    digest = hashlib.sha256()
    digest.update(render(statement).encode("utf-8"))
    for eq in premises.equalities:
        digest.update(b"|")
        digest.update(str(eq).encode("utf-8"))
    for stmt in premises.harvested_statements:
        digest.update(b"|h|")
        digest.update(render(stmt).encode("utf-8"))
    return digest.hexdigest()[:12]


def lean_file_name(statement: Node, premises: PremiseSet) -> str:
    return f"stmt_{statement_hash(statement, premises)}.lean"


def export_lean(statement: Node, premises: PremiseSet) -> str:
    """Self-contained Lean 4 theorem text for a statement under premises."""
    name = f"stmt_{statement_hash(statement, premises)}"
    binders = " ".join(FEATURES)
    lines = [_HEADER, ""]
    lines.append(f"theorem {name}")
    lines.append(f"    ({binders} : ℤ)")
    lines.append("    (hdim : w1 = h2)")
    for i, eq in enumerate(premises.equalities, start=1):
        label = eq.name or f"p{i}"
        lines.append(f"    ({label} : {_lean_equality(eq)})")
    for i, harvested in enumerate(premises.harvested_statements, start=1):
        lines.append(f"    (q{i} : {_lean_goal(harvested)})")
    lines.append(f"    : {_lean_goal(statement)} := by")
    lines.append("  grind")
    return "\n".join(lines) + "\n"
