"""Typed expression language over the eight incidence-matrix features."""

from .ast import (
    FEATURES,
    And,
    Arith,
    Const,
    Equals,
    Feature,
    Implies,
    Node,
    Not,
    StatementTypeError,
    is_boolean,
    render,
    tree_size,
)
from .parse import StatementSyntaxError, parse
from .evaluate import evaluate, evaluate_batch
from .canonical import (
    AtomicFormula,
    CanonicalForm,
    atomic_formulae,
    canonicalize,
)
from .concepts import ConceptFlags, concept_vectors, detect_concepts

__all__ = [
    "FEATURES",
    "And",
    "Arith",
    "AtomicFormula",
    "CanonicalForm",
    "ConceptFlags",
    "Const",
    "Equals",
    "Feature",
    "Implies",
    "Node",
    "Not",
    "StatementSyntaxError",
    "StatementTypeError",
    "atomic_formulae",
    "canonicalize",
    "concept_vectors",
    "detect_concepts",
    "evaluate",
    "evaluate_batch",
    "is_boolean",
    "parse",
    "render",
    "tree_size",
]
