"""Concept detection: which invariants an atomic formula expresses.

The four reference functionals over the canonical feature axes are

    chi = h1 - w1 + w2      (alternating dimension sum)
    b0  = h1 - r1           (component count)
    b1  = n1 - r2           (middle homology dimension)
    b2  = n2                (top homology dimension)

An atom's linear part ``f`` *contains* a set of concepts ``S`` when ``f``
can be written as an integer combination of the concepts in ``S`` plus an
element of the rational span of the premise functionals, and no smaller set
of concepts admits such a representation.  Flags are the union over all
minimum-cardinality representations; ties (for example ``b0 - b1`` versus
``chi - b2``, which coincide modulo rank-nullity) set every concept that
appears in some minimal representation.  Representations with all concept
coefficients zero mean the atom is premise-trivial and set no flags, so
restating a premise never counts as noticing a concept.

Nonlinear monomials never participate: an atom with products contributes
only its linear residual.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .ast import Node
from .canonical import CANON_FEATURES, atomic_formulae

_DIM = len(CANON_FEATURES)

_CONCEPT_ORDER = ("chi", "b0", "b1", "b2")


def concept_vectors() -> dict[str, tuple[int, ...]]:
    """Reference functionals as coefficient vectors over CANON_FEATURES."""
    idx = {name: i for i, name in enumerate(CANON_FEATURES)}
    vecs = {
        "chi": {"h1": 1, "w1": -1, "w2": 1},
        "b0": {"h1": 1, "r1": -1},
        "b1": {"n1": 1, "r2": -1},
        "b2": {"n2": 1},
    }
    out = {}
    for name, entries in vecs.items():
        v = [0] * _DIM
        for feat, c in entries.items():
            v[idx[feat]] = c
        out[name] = tuple(v)
    return out


@dataclass(frozen=True)
class ConceptFlags:
    has_chi: bool = False
    has_b0: bool = False
    has_b1: bool = False
    has_b2: bool = False

    def __or__(self, other: "ConceptFlags") -> "ConceptFlags":
        return ConceptFlags(
            self.has_chi or other.has_chi,
            self.has_b0 or other.has_b0,
            self.has_b1 or other.has_b1,
            self.has_b2 or other.has_b2,
        )

    def any(self) -> bool:
        return self.has_chi or self.has_b0 or self.has_b1 or self.has_b2

    def any_b(self) -> bool:
        return self.has_b0 or self.has_b1 or self.has_b2


class _SpanReducer:
    """Reduction modulo the rational span of a set of vectors."""

    def __init__(self, vectors) -> None:
        self.rows: list[tuple[int, list[Fraction]]] = []  # (pivot, row)
        for vec in vectors:
            self.add(vec)

    def add(self, vec) -> bool:
        row = self.reduce(vec)
        for pivot, val in enumerate(row):
            if val:
                inv = Fraction(1) / val
                self.rows.append((pivot, [x * inv for x in row]))
                self.rows.sort(key=lambda r: r[0])
                return True
        return False

    def reduce(self, vec) -> list[Fraction]:
        row = [Fraction(x) for x in vec]
        for pivot, base in self.rows:
            if row[pivot]:
                coeff = row[pivot]
                row = [x - coeff * b for x, b in zip(row, base)]
        return row


def _solve_subset(reduced_concepts, target) -> list[Fraction] | None:
    """Solve sum(c_j * u_j) = target exactly; None when unsolvable.

    Free coefficients (dependent columns) are set to zero, which the caller
    interprets as a smaller true support.
    """
    k = len(reduced_concepts)
    if k == 0:
        return [] if not any(target) else None
    m = [
        [Fraction(reduced_concepts[j][i]) for j in range(k)] + [Fraction(target[i])]
        for i in range(_DIM)
    ]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(k):
        pr = next((i for i in range(row, _DIM) if m[i][col]), None)
        if pr is None:
            continue
        m[row], m[pr] = m[pr], m[row]
        inv = Fraction(1) / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for i in range(_DIM):
            if i != row and m[i][col]:
                factor = m[i][col]
                m[i] = [x - factor * y for x, y in zip(m[i], m[row])]
        pivots.append((row, col))
        row += 1
    if any(m[i][k] for i in range(row, _DIM)):
        return None
    coeffs = [Fraction(0)] * k
    for r, c in pivots:
        coeffs[c] = m[r][k]
    return coeffs


class ConceptContext:
    """Premise-reduced concept basis, reusable across many statements."""

    def __init__(self, premise_functionals) -> None:
        self.premises = [tuple(int(x) for x in v) for v in premise_functionals]
        self.reducer = _SpanReducer(self.premises)
        vecs = concept_vectors()
        self.reduced = {
            name: self.reducer.reduce(vecs[name]) for name in _CONCEPT_ORDER
        }

    def flags_for_functional(
        self, functional, coefficient_mode: str = "integer"
    ) -> ConceptFlags:
        target = self.reducer.reduce(functional)
        if not any(target):
            return ConceptFlags()  # premise-trivial: nothing was noticed
        best_k: int | None = None
        fired: set[str] = set()
        for k in range(1, len(_CONCEPT_ORDER) + 1):
            if best_k is not None:
                break
            for subset in combinations(_CONCEPT_ORDER, k):
                coeffs = _solve_subset(
                    [self.reduced[name] for name in subset], target
                )
                if coeffs is None:
                    continue
                if any(c == 0 for c in coeffs):
                    continue  # true support is smaller; handled at lower k
                if not _coeffs_allowed(coeffs, coefficient_mode):
                    continue
                best_k = k
                fired.update(subset)
        return ConceptFlags(
            "chi" in fired, "b0" in fired, "b1" in fired, "b2" in fired
        )


def _coeffs_allowed(coeffs, mode: str) -> bool:
    if mode == "any":
        return True
    if mode == "unit":
        return all(abs(c) == 1 for c in coeffs)
    if mode == "integer":
        return all(c.denominator == 1 for c in coeffs)
    raise ValueError(f"unknown coefficient mode {mode!r}")


def _premise_functionals(premises) -> list[tuple[int, ...]]:
    if premises is None:
        return []
    getter = getattr(premises, "linear_functionals", None)
    if getter is not None:
        return [tuple(v) for v in getter()]
    return [tuple(v) for v in premises]


_CONTEXT_CACHE: dict[tuple, ConceptContext] = {}


def _context(premises) -> ConceptContext:
    functionals = _premise_functionals(premises)
    key = tuple(sorted(functionals))
    ctx = _CONTEXT_CACHE.get(key)
    if ctx is None:
        ctx = ConceptContext(functionals)
        if len(_CONTEXT_CACHE) < 64:
            _CONTEXT_CACHE[key] = ctx
        return ctx
    return ctx


def detect_concepts(
    statement: Node, premises=None, coefficient_mode: str = "integer"
) -> ConceptFlags:
    """Union of per-atom concept flags for a statement.

    ``premises`` may be a prover premise set, an iterable of linear
    functionals over CANON_FEATURES, or None (no allowed substitutions).
    ``coefficient_mode`` controls what counts as containing a concept:
    ``"integer"`` (any nonzero integer multiple, the default), ``"unit"``
    (coefficient exactly +-1), or ``"any"`` (any nonzero rational).
    """
    ctx = _context(premises)
    flags = ConceptFlags()
    for atom in atomic_formulae(statement):
        if not any(atom.canonical.linear):
            continue
        flags = flags | ctx.flags_for_functional(
            atom.canonical.linear, coefficient_mode
        )
    return flags
