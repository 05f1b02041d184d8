"""Random-effects meta-analysis over sampled effect sizes.

Pools N effect sizes with their in-sample variances: fixed weights
W_i = 1/V_i give the heterogeneity statistic Q and the scaling constant c,
from which the between-sample variance is estimated piecewise
(max(0, (Q - (N-1)) / c)).  Random-effects weights v_i = 1/(V_i + sigma^2)
then yield the combined effect size, its standard error, and a two-tailed
normal p-value computed in complementary-error form so far tails do not
cancel to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidVarianceError, ParameterError


@dataclass(frozen=True)
class MetaResult:
    ces: float
    se: float
    sigma2_between: float
    q_statistic: float
    c_value: float
    p_combined: float
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "ces": self.ces,
            "se": self.se,
            "sigma2_between": self.sigma2_between,
            "q_statistic": self.q_statistic,
            "c_value": self.c_value,
            "p_combined": self.p_combined,
            "n_samples": self.n_samples,
        }


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def combined_pvalue(ces: float, se: float) -> float:
    """Two-tailed p for z = ces/se: 2 * (1 - Phi(|z|)), clamped to [0, 1]."""
    if se <= 0.0:
        raise ParameterError(f"standard error must be positive, got {se}")
    z = abs(ces / se)
    # 2 * (1 - Phi(z)) == erfc(z / sqrt(2)) without cancellation on the tail.
    p = math.erfc(z / math.sqrt(2.0))
    return min(max(p, 0.0), 1.0)


def combine(effect_sizes, variances) -> MetaResult:
    """Pool per-sample (ES_i, V_i) pairs under the random-effects model.

    All accumulations run through numpy's pairwise float64 summation, so the
    result is independent of sample order up to exact permutation invariance
    of the inputs (sums over the same multiset of terms).

    N = 1 leaves c = 0 and the between-variance formula undefined; the only
    consistent limit is sigma2_between = 0, making CES the single ES.
    """
    es = np.asarray(effect_sizes, dtype=np.float64)
    v = np.asarray(variances, dtype=np.float64)
    if es.ndim != 1 or es.shape != v.shape or es.shape[0] < 1:
        raise ParameterError("need one variance per effect size, at least one sample")
    if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
        raise InvalidVarianceError("every in-sample variance must be positive and finite")

    n = es.shape[0]
    w = 1.0 / v
    sum_w = float(np.sum(w))
    sum_w2 = float(np.sum(w * w))
    sum_wes = float(np.sum(w * es))
    sum_wes2 = float(np.sum(w * es * es))

    q = sum_wes2 - sum_wes * sum_wes / sum_w
    c = sum_w - sum_w2 / sum_w
    if n == 1 or q < n - 1:
        sigma2 = 0.0
    else:
        sigma2 = (q - (n - 1)) / c

    v_star = 1.0 / (v + sigma2)
    sum_vstar = float(np.sum(v_star))
    ces = float(np.sum(v_star * es)) / sum_vstar
    se = math.sqrt(1.0 / sum_vstar)
    return MetaResult(
        ces=ces,
        se=se,
        sigma2_between=sigma2,
        q_statistic=q,
        c_value=c,
        p_combined=combined_pvalue(ces, se),
        n_samples=n,
    )
