"""Cluster bootstrap and the effective-sigma comparison.

Episodes are the resampling unit: statements inside an episode are
correlated through the policies, so confidence intervals come from
resampling whole episodes with replacement and recomputing the statistic.
The pairwise comparison maps the bootstrapped probability that one model's
statistic exceeds another's through the inverse normal CDF; probabilities
indistinguishable from 0 or 1 at the resampling resolution are reported as
a clipped five-sigma effect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import rng as _rng


@dataclass(frozen=True)
class BootstrapResult:
    point: float
    ci_low: float
    ci_high: float
    resamples: int


@dataclass(frozen=True)
class PairwiseSigma:
    ratio: float          # point_i / point_j, inf when the denominator is 0
    sigma: float          # signed effective sigma, clipped to +-SIGMA_CLIP
    clipped: bool         # True when every resample fell on one side
    p_hat: float

    def label(self) -> str:
        if self.clipped:
            return f"≥{SIGMA_CLIP:g}σ" if self.sigma > 0 else f"≤-{SIGMA_CLIP:g}σ"
        return f"{self.sigma:.2f}σ"


SIGMA_CLIP = 5.0


def cluster_bootstrap(per_episode_values, statistic, resamples: int = 10_000,
                      seed: int = 0) -> BootstrapResult:
    """Percentile interval from resampling episodes with replacement.

    ``statistic`` maps a list of per-episode values to a real number; the
    95% interval is the 2.5/97.5 empirical percentile range over the
    resampled statistics.  Seeded and deterministic.
    """
    values = list(per_episode_values)
    if not values:
        raise ValueError("cluster_bootstrap needs at least one episode")
    if resamples < 1:
        raise ValueError("resamples must be positive")
    n = len(values)
    gen = _rng.generator(seed, "bootstrap")
    point = float(statistic(values))
    stats = np.empty(resamples)
    for r in range(resamples):
        idx = gen.integers(n, size=n)
        stats[r] = statistic([values[i] for i in idx])
    low, high = np.quantile(stats, [0.025, 0.975])
    return BootstrapResult(point, float(low), float(high), resamples)


def pairwise_sigma(values_i, values_j, statistic, resamples: int = 10_000,
                   seed: int = 0) -> PairwiseSigma:
    """One-sided effective sigma that model i outperforms model j.

    Both sides are resampled independently; ties count half, so identical
    inputs land at p = 0.5 and sigma 0 by construction.  When every
    resample is strictly one-sided the effect is reported as clipped at
    five sigma (the resampling resolution).
    """
    values_i = list(values_i)
    values_j = list(values_j)
    if not values_i or not values_j:
        raise ValueError("pairwise_sigma needs nonempty episode sets")
    point_i = float(statistic(values_i))
    point_j = float(statistic(values_j))
    if values_i == values_j:
        return PairwiseSigma(1.0, 0.0, False, 0.5)  # identical by convention
    ratio = math.inf if point_j == 0 else point_i / point_j
    gen_i = _rng.generator(seed, "pairwise", "i")
    gen_j = _rng.generator(seed, "pairwise", "j")
    n_i, n_j = len(values_i), len(values_j)
    wins = ties = 0
    for _ in range(resamples):
        idx_i = gen_i.integers(n_i, size=n_i)
        idx_j = gen_j.integers(n_j, size=n_j)
        stat_i = statistic([values_i[k] for k in idx_i])
        stat_j = statistic([values_j[k] for k in idx_j])
        if stat_i > stat_j:
            wins += 1
        elif stat_i == stat_j:
            ties += 1
    p_hat = (wins + 0.5 * ties) / resamples
    if wins == resamples:
        return PairwiseSigma(ratio, SIGMA_CLIP, True, p_hat)
    if wins == 0 and ties == 0:
        return PairwiseSigma(ratio, -SIGMA_CLIP, True, p_hat)
    sigma = inverse_normal_cdf(p_hat)
    sigma = max(-SIGMA_CLIP, min(SIGMA_CLIP, sigma))
    return PairwiseSigma(ratio, sigma, False, p_hat)


# --------------------------------------------------------------------------
# Inverse normal CDF: Acklam's rational approximation with one Halley
# refinement through erfc, giving absolute error far below 1e-7 on
# [1e-4, 1 - 1e-4] (verified against scipy in the tests).

_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def inverse_normal_cdf(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    # One Halley step against the exact CDF.
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)
