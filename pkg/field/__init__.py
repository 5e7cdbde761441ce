# field/__init__.py
"""Lattice, free field, disorder and the interacting model weight"""

from .lattice import BoxLattice, SiteIndex, build_lattice, neighbors
from .gaussian import (
    FieldConfig, GaussianSolve, SigmaEstimate, harmonic_extension, sample_free_field,
    green_function, sigma_d_sq, center_variance, sample_boundary_at_height,
)
from .disorder import DisorderLaw, DisorderField, lam, xi, xi_truncated, h_shift_for_truncation
from .model import (
    BoundarySpec, ModelParams, SiteIndicators, site_indicators, generalized_indicator,
    log_weight, boundary_energy, site_rewards, disorder_values, resolve_boundary,
)

__all__ = [
    'BoxLattice', 'SiteIndex', 'build_lattice', 'neighbors',
    'FieldConfig', 'GaussianSolve', 'SigmaEstimate', 'harmonic_extension', 'sample_free_field',
    'green_function', 'sigma_d_sq', 'center_variance', 'sample_boundary_at_height',
    'DisorderLaw', 'DisorderField', 'lam', 'xi', 'xi_truncated', 'h_shift_for_truncation',
    'BoundarySpec', 'ModelParams', 'SiteIndicators', 'site_indicators', 'generalized_indicator',
    'log_weight', 'boundary_energy', 'site_rewards', 'disorder_values', 'resolve_boundary',
]
