# utils/stats.py
from __future__ import annotations
from typing import Sequence, Tuple

import numpy as np


def batch_means_se(samples: Sequence[float], n_batches: int = 20) -> float:
    """Standard error of the mean of a correlated series by non-overlapping batch means"""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        return 0.0
    n_batches = max(2, min(n_batches, n // 2))
    size = n // n_batches
    batches = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(np.std(batches, ddof=1) / np.sqrt(n_batches))


def combine_replicas(means: Sequence[float], within_se: Sequence[float]) -> Tuple[float, float]:
    """
    Grand mean over disorder replicas and its standard error.

    The spread of replica means already contains the within-chain noise; with a
    single replica only the within-chain error is available.
    """
    m = np.asarray(means, dtype=float)
    w = np.asarray(within_se, dtype=float)
    r = m.size
    if r == 1:
        return float(m[0]), float(w[0])
    between = float(np.var(m, ddof=1) / r)
    within = float(np.sum(w ** 2) / r ** 2)
    return float(m.mean()), float(np.sqrt(max(between, within)))


def cumulative_trapezoid(x: np.ndarray, y: np.ndarray, y_se: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Cumulative trapezoid integral from x[0] with independent pointwise errors"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    y_se = np.asarray(y_se, dtype=float)
    values = np.zeros_like(x)
    variances = np.zeros_like(x)
    coeff = np.zeros_like(x)
    for k in range(1, x.size):
        dx = x[k] - x[k - 1]
        values[k] = values[k - 1] + 0.5 * dx * (y[k] + y[k - 1])
        coeff[k - 1] += 0.5 * dx
        coeff[k] += 0.5 * dx
        variances[k] = float(np.sum((coeff[: k + 1] * y_se[: k + 1]) ** 2))
    return values, np.sqrt(variances)


def sample_variance_se(x: Sequence[float]) -> Tuple[float, float]:
    """Unbiased sample variance and a fourth-moment standard error for it"""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        return 0.0, 0.0
    var = float(np.var(x, ddof=1))
    m4 = float(np.mean((x - x.mean()) ** 4))
    se = float(np.sqrt(max(m4 - var * var, 0.0) / n))
    return var, se
