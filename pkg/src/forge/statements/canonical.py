"""Canonical forms for atomic (equality) formulae.

An equality ``lhs = rhs`` is expanded into the integer polynomial
``lhs - rhs`` over the feature variables, with ``h2`` rewritten to ``w1``
(both denote the edge count).  The polynomial is split into a linear part,
a constant, and a multiset of nonlinear monomials, then normalized: divide
by the content (gcd over all coefficients) and flip signs so the leading
nonzero coefficient is positive.  Two linear equalities are equivalent over
the integers exactly when they share a canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .ast import (
    Arith,
    Const,
    Equals,
    Feature,
    Node,
    Not,
    And,
    Implies,
)

#: Feature axes of canonical linear parts; ``h2`` is merged into ``w1``.
CANON_FEATURES = ("r1", "r2", "n1", "n2", "h1", "w1", "w2")
_CANON_INDEX = {name: i for i, name in enumerate(CANON_FEATURES)}

Monomial = tuple[str, ...]


@dataclass(frozen=True)
class CanonicalForm:
    """Normalized polynomial-equals-zero representation of an equality."""

    linear: tuple[int, ...]          # coefficients along CANON_FEATURES
    constant: int
    nonlinear: tuple[tuple[Monomial, int], ...]   # sorted, degree >= 2

    @property
    def is_trivially_true(self) -> bool:
        return self.constant == 0 and not any(self.linear) and not self.nonlinear

    @property
    def is_trivially_false(self) -> bool:
        return self.constant != 0 and not any(self.linear) and not self.nonlinear

    @property
    def is_linear(self) -> bool:
        return not self.nonlinear

    def key(self) -> tuple:
        return (self.linear, self.constant, self.nonlinear)

    def holds(self, features) -> bool:
        values = getattr(features, "features", features)
        total = self.constant
        for coeff, idx in zip(self.linear, range(len(CANON_FEATURES))):
            if coeff:
                total += coeff * int(values[_feature_slot(idx)])
        for monomial, coeff in self.nonlinear:
            prod = coeff
            for name in monomial:
                prod *= int(values[_feature_slot(_CANON_INDEX[name])])
            total += prod
        return total == 0

    def __str__(self) -> str:
        terms: list[str] = []
        for coeff, name in zip(self.linear, CANON_FEATURES):
            if coeff:
                terms.append(_term(coeff, name))
        for monomial, coeff in self.nonlinear:
            terms.append(_term(coeff, "*".join(monomial)))
        if self.constant:
            terms.append(_term(self.constant, None))
        if not terms:
            return "0 = 0"
        lead = terms[0][2:] if terms[0].startswith("+ ") else "- " + terms[0][2:]
        rest = " ".join(terms[1:])
        return (lead + (" " + rest if rest else "")) + " = 0"


def _term(coeff: int, symbol: str | None) -> str:
    sign = "+" if coeff > 0 else "-"
    mag = abs(coeff)
    if symbol is None:
        return f"{sign} {mag}"
    if mag == 1:
        return f"{sign} {symbol}"
    return f"{sign} {mag}{symbol}"


# Feature slots in the full 8-feature order, for evaluating canonical forms
# directly on datapoints: canonical index -> index into FEATURES.
_CANON_TO_FULL = (0, 1, 2, 3, 4, 5, 7)


def _feature_slot(canon_idx: int) -> int:
    return _CANON_TO_FULL[canon_idx]


@dataclass(frozen=True)
class AtomicFormula:
    """An ``Equals`` subtree together with its canonical form."""

    node: Equals
    canonical: CanonicalForm

    def __str__(self) -> str:
        return str(self.canonical)


def _poly(node: Node) -> dict[Monomial, int]:
    if isinstance(node, Const):
        return {(): node.value} if node.value else {}
    if isinstance(node, Feature):
        name = "w1" if node.name == "h2" else node.name
        return {(name,): 1}
    if isinstance(node, Arith):
        left = _poly(node.left)
        right = _poly(node.right)
        if node.op == "+":
            return _add(left, right, 1)
        if node.op == "-":
            return _add(left, right, -1)
        out: dict[Monomial, int] = {}
        for m1, c1 in left.items():
            for m2, c2 in right.items():
                key = tuple(sorted(m1 + m2))
                val = out.get(key, 0) + c1 * c2
                if val:
                    out[key] = val
                elif key in out:
                    del out[key]
        return out
    raise TypeError(f"not an arithmetic node: {node!r}")


def _add(a: dict[Monomial, int], b: dict[Monomial, int], sign: int) -> dict[Monomial, int]:
    out = dict(a)
    for key, val in b.items():
        new = out.get(key, 0) + sign * val
        if new:
            out[key] = new
        elif key in out:
            del out[key]
    return out


def canonicalize(atom: Equals | AtomicFormula) -> CanonicalForm:
    """Canonical form of an equality; idempotent and sign-normalized."""
    node = atom.node if isinstance(atom, AtomicFormula) else atom
    if not isinstance(node, Equals):
        raise TypeError("canonicalize expects an Equals node")
    poly = _add(_poly(node.left), _poly(node.right), -1)

    linear = [0] * len(CANON_FEATURES)
    constant = 0
    nonlinear: dict[Monomial, int] = {}
    for monomial, coeff in poly.items():
        if len(monomial) == 0:
            constant = coeff
        elif len(monomial) == 1:
            linear[_CANON_INDEX[monomial[0]]] = coeff
        else:
            nonlinear[monomial] = coeff

    nl_sorted = tuple(sorted(nonlinear.items()))
    coeffs = [c for c in linear if c] + [c for _, c in nl_sorted]
    if constant:
        coeffs.append(constant)
    if not coeffs:
        return CanonicalForm(tuple(linear), 0, ())

    content = 0
    for c in coeffs:
        content = gcd(content, abs(c))
    lead = next(c for c in coeffs if c)
    scale = (1 if lead > 0 else -1) * content
    linear = [c // scale for c in linear]
    constant = constant // scale
    nl_sorted = tuple((m, c // scale) for m, c in nl_sorted)
    return CanonicalForm(tuple(linear), constant, nl_sorted)


def atomic_formulae(statement: Node) -> list[AtomicFormula]:
    """All maximal equality subtrees, left to right, with canonical forms."""
    out: list[AtomicFormula] = []

    def walk(node: Node) -> None:
        if isinstance(node, Equals):
            out.append(AtomicFormula(node, canonicalize(node)))
        elif isinstance(node, Not):
            walk(node.child)
        elif isinstance(node, (And, Implies)):
            walk(node.left)
            walk(node.right)

    walk(statement)
    return out
