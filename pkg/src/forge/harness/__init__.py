"""Experiment assembly, metrics, resampling statistics, ablation reports."""

from .stats import (
    BootstrapResult,
    PairwiseSigma,
    cluster_bootstrap,
    inverse_normal_cdf,
    pairwise_sigma,
)
from .metrics import MetricsRow, compute_metrics, ratio_of_sums
from .experiments import (
    ExperimentConfigError,
    ExperimentSpec,
    build_experiment,
    concept_premises_for,
)
from .ablation import run_ablation_suite, write_reports

__all__ = [
    "BootstrapResult",
    "ExperimentConfigError",
    "ExperimentSpec",
    "MetricsRow",
    "PairwiseSigma",
    "build_experiment",
    "cluster_bootstrap",
    "compute_metrics",
    "concept_premises_for",
    "inverse_normal_cdf",
    "pairwise_sigma",
    "ratio_of_sums",
    "run_ablation_suite",
    "write_reports",
]
