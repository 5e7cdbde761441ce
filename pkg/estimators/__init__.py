# estimators/__init__.py
"""Exact oracle, Monte Carlo free energies, reduced partition function and analytic bounds"""

from .oracle import exact_log_Z_small, quenched_log_Z_single_site, annealed_log_Z, MAX_ORACLE_SITES
from .free_energy import (
    McmcSettings, contact_density, free_energy_TI, contact_onset,
    log_partition_ti, superadditive_lower_bound,
)
from .bounds import (
    jensen_lower_bound, log_jensen_lower_bound, jensen_optimal_height, explicit_lower_bound,
    log_explicit_lower_bound, maximized_jensen_bound, onesite_quantities, bracket_root,
    ratio_estimate, normalized_ratio, p_over_p, p_over_p_asymptote,
    K_gap, quenched_K_gap, fit_K_gap_rate, scaling_probe, delta_pinning_conjecture, window_exponent,
)
from .reduced import ReducedPartition, SecondMomentReport, reduced_Q, second_moment_report

__all__ = [
    'exact_log_Z_small', 'quenched_log_Z_single_site', 'annealed_log_Z', 'MAX_ORACLE_SITES',
    'McmcSettings', 'contact_density', 'free_energy_TI', 'contact_onset',
    'log_partition_ti', 'superadditive_lower_bound',
    'jensen_lower_bound', 'log_jensen_lower_bound', 'jensen_optimal_height', 'explicit_lower_bound',
    'log_explicit_lower_bound', 'maximized_jensen_bound', 'onesite_quantities', 'bracket_root',
    'ratio_estimate', 'normalized_ratio', 'p_over_p', 'p_over_p_asymptote',
    'K_gap', 'quenched_K_gap', 'fit_K_gap_rate', 'scaling_probe', 'delta_pinning_conjecture', 'window_exponent',
    'ReducedPartition', 'SecondMomentReport', 'reduced_Q', 'second_moment_report',
]
