"""Statement evaluation: exact integer semantics, scalar and batched.

The batched evaluator runs on an ``(n, 8)`` int64 feature matrix with numpy.
Because chained multiplications can exceed 64 bits, a worst-case magnitude
bound is propagated through the tree first; trees that cannot be certified
safe fall back to per-row Python-int evaluation, which is exact at any size.
"""

from __future__ import annotations

import numpy as np

from .ast import (
    And,
    Arith,
    Const,
    Equals,
    Feature,
    FEATURE_INDEX,
    Implies,
    Node,
    Not,
    is_boolean,
)

_INT64_SAFE = 1 << 62


def evaluate(statement: Node, features) -> bool:
    """Truth value of a statement on one datapoint.

    ``features`` is anything with a ``features`` attribute or an 8-sequence
    in canonical feature order.  Arithmetic is exact (Python integers);
    implication is material.
    """
    values = getattr(features, "features", features)
    return bool(_eval_scalar(statement, values))


def _eval_scalar(node: Node, values):
    if isinstance(node, Feature):
        return int(values[FEATURE_INDEX[node.name]])
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Arith):
        a = _eval_scalar(node.left, values)
        b = _eval_scalar(node.right, values)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a * b
    if isinstance(node, Equals):
        return _eval_scalar(node.left, values) == _eval_scalar(node.right, values)
    if isinstance(node, And):
        return _eval_scalar(node.left, values) and _eval_scalar(node.right, values)
    if isinstance(node, Implies):
        return (not _eval_scalar(node.left, values)) or _eval_scalar(node.right, values)
    if isinstance(node, Not):
        return not _eval_scalar(node.child, values)
    raise TypeError(f"not an expression node: {node!r}")


def _magnitude_bound(node: Node, feature_max: int) -> int:
    if isinstance(node, Feature):
        return feature_max
    if isinstance(node, Const):
        return abs(node.value)
    if isinstance(node, Arith):
        a = _magnitude_bound(node.left, feature_max)
        b = _magnitude_bound(node.right, feature_max)
        return a * b if node.op == "*" else a + b
    if isinstance(node, Not):
        return _magnitude_bound(node.child, feature_max)
    return max(
        _magnitude_bound(node.left, feature_max),
        _magnitude_bound(node.right, feature_max),
    )


def evaluate_batch(statement: Node, feature_matrix: np.ndarray) -> np.ndarray:
    """Boolean vector of ``statement`` over rows of an ``(n, 8)`` matrix."""
    if not is_boolean(statement):
        raise TypeError("evaluate_batch expects a Boolean-rooted statement")
    fm = np.asarray(feature_matrix, dtype=np.int64)
    if fm.ndim != 2 or fm.shape[1] != len(FEATURE_INDEX):
        raise ValueError("feature matrix must have shape (n, 8)")
    feature_max = int(np.abs(fm).max()) if fm.size else 0
    if _magnitude_bound(statement, feature_max) < _INT64_SAFE:
        return _eval_vector(statement, fm)
    out = np.empty(fm.shape[0], dtype=bool)
    for i in range(fm.shape[0]):
        out[i] = bool(_eval_scalar(statement, fm[i]))
    return out


def _eval_vector(node: Node, fm: np.ndarray):
    if isinstance(node, Feature):
        return fm[:, FEATURE_INDEX[node.name]]
    if isinstance(node, Const):
        return np.full(fm.shape[0], node.value, dtype=np.int64)
    if isinstance(node, Arith):
        a = _eval_vector(node.left, fm)
        b = _eval_vector(node.right, fm)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a * b
    if isinstance(node, Equals):
        return _eval_vector(node.left, fm) == _eval_vector(node.right, fm)
    if isinstance(node, And):
        return _eval_vector(node.left, fm) & _eval_vector(node.right, fm)
    if isinstance(node, Implies):
        return ~_eval_vector(node.left, fm) | _eval_vector(node.right, fm)
    if isinstance(node, Not):
        return ~_eval_vector(node.child, fm)
    raise TypeError(f"not an expression node: {node!r}")
