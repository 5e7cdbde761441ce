# utils/__init__.py
"""Shared numerical helpers: seeding, Gaussian interval masses, statistics"""

from .normal import (
    log_mass, log_interval_prob, interval_prob, truncated_ppf,
    gaussian_tail, gaussian_tail_asymptote,
)
from .rng import derive_seed, make_rng, seed_sequence, philox_key, site_stream
from .stats import batch_means_se, combine_replicas, cumulative_trapezoid, sample_variance_se

__all__ = [
    'log_mass', 'log_interval_prob', 'interval_prob', 'truncated_ppf',
    'gaussian_tail', 'gaussian_tail_asymptote',
    'derive_seed', 'make_rng', 'seed_sequence', 'philox_key', 'site_stream',
    'batch_means_se', 'combine_replicas', 'cumulative_trapezoid', 'sample_variance_se',
]
