"""Weighted accuracy and the prior-regularized search loss.

For a statement s over weighted data:

    W(s)       = sum_i lambda_i * [s true on d_i] / sum_i lambda_i
    loss(s)    = exp( exp(alpha * (1 - W(s))) - sum_k p_k(s) )

where the prior sum collects one term per usage class present in s, a
per-node ``length`` term, and the nested-negation penalty.  Both
proportionality constants are fixed to one; the search compares losses, so
only ordering matters, and ordering is preserved by the inner exponent
(``log_loss`` below), which is what the genetic engines actually rank by.
"""

from __future__ import annotations

import math

import numpy as np

from ..statements.ast import Node, operator_classes, tree_size
from ..statements.evaluate import evaluate_batch
from .config import RegressorConfig


class ZeroWeightError(ValueError):
    """All attention weights are zero: the weighted mean is undefined."""


def _as_weights(lam, n: int) -> np.ndarray:
    w = np.asarray(lam, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"weights must have shape ({n},)")
    if np.any(w < 0) or np.any(w > 1):
        raise ValueError("weights must lie in [0, 1]")
    return w


def _as_matrix(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return data
    from ..surfaces.datapoints import feature_matrix

    return feature_matrix(data)


def weighted_accuracy(statement: Node, data, lam) -> float:
    """Exactly the lambda-weighted mean of Boolean evaluations."""
    fm = _as_matrix(data)
    w = _as_weights(lam, fm.shape[0])
    total = float(w.sum())
    if total == 0.0:
        raise ZeroWeightError("weighted accuracy needs a positive total weight")
    truth = evaluate_batch(statement, fm)
    return float(np.dot(w, truth)) / total


def accuracy_from_vector(truth: np.ndarray, w: np.ndarray, total: float) -> float:
    if total == 0.0:
        raise ZeroWeightError("weighted accuracy needs a positive total weight")
    return float(np.dot(w, truth)) / total


def prior_sum(statement: Node, cfg: RegressorConfig) -> float:
    """Sum of prior values over the usage classes present in a statement."""
    classes = operator_classes(statement)
    total = sum(cfg.prior(key) for key in classes if key != "nested_not")
    if "nested_not" in classes:
        total += cfg.prior("nested_not")
    total += cfg.prior("length") * tree_size(statement)
    return total


def log_loss_from_parts(accuracy: float, priors: float, alpha: float) -> float:
    return math.exp(alpha * (1.0 - accuracy)) - priors


def loss(statement: Node, data, lam, cfg: RegressorConfig) -> float:
    """The full exponential loss; strictly decreasing in accuracy and priors."""
    acc = weighted_accuracy(statement, data, lam)
    return math.exp(log_loss_from_parts(acc, prior_sum(statement, cfg), cfg.alpha))
