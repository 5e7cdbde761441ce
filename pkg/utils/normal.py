# utils/normal.py
"""
Standard normal interval masses computed in log space.

Every sampler weight and every analytic bound goes through these helpers so
that deep tails (|t| of a few hundred) keep full relative precision.
"""
from __future__ import annotations
from typing import Union

import numpy as np
from scipy.special import erfc, log_ndtr
from scipy.stats import truncnorm

ArrayLike = Union[float, np.ndarray]

_LOG2 = np.log(2.0)


def _log1mexp(x: np.ndarray) -> np.ndarray:
    """log(1 - exp(x)) for x <= 0"""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > -_LOG2, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))


def log_mass(lo: ArrayLike, hi: ArrayLike) -> ArrayLike:
    """
    log P(lo < Z < hi) for a standard normal Z.

    Intervals lying entirely to the right of zero are reflected so that both
    endpoints sit in the lower tail, where log_ndtr is accurate.
    """
    lo_arr, hi_arr = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    flip = lo_arr > 0
    a = np.where(flip, -hi_arr, lo_arr)
    b = np.where(flip, -lo_arr, hi_arr)
    la = log_ndtr(a)
    lb = log_ndtr(b)
    with np.errstate(invalid="ignore"):
        out = lb + _log1mexp(la - lb)
    out = np.where(b <= a, -np.inf, out)
    return out[()] if out.ndim == 0 else out


def log_interval_prob(lo: ArrayLike, hi: ArrayLike, mean: ArrayLike, sd: ArrayLike) -> ArrayLike:
    """log P(lo < X < hi) for X ~ N(mean, sd^2)"""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    return log_mass((np.asarray(lo, dtype=float) - mean) / sd, (np.asarray(hi, dtype=float) - mean) / sd)


def interval_prob(lo: ArrayLike, hi: ArrayLike, mean: ArrayLike = 0.0, sd: ArrayLike = 1.0) -> ArrayLike:
    return np.exp(log_interval_prob(lo, hi, mean, sd))


def truncated_ppf(q: ArrayLike, lo: ArrayLike, hi: ArrayLike) -> np.ndarray:
    """Inverse CDF of the standard normal restricted to (lo, hi)"""
    return truncnorm.ppf(q, lo, hi)


def gaussian_tail(t: ArrayLike) -> ArrayLike:
    """P(Z > t) = erfc(t / sqrt 2) / 2"""
    return 0.5 * erfc(np.asarray(t, dtype=float) / np.sqrt(2.0))


def gaussian_tail_asymptote(t: ArrayLike) -> ArrayLike:
    """exp(-t^2/2) / (t sqrt(2 pi)), valid for large positive t"""
    t = np.asarray(t, dtype=float)
    return np.exp(-0.5 * t * t) / (t * np.sqrt(2.0 * np.pi))
