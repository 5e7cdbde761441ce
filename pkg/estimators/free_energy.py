# estimators/free_energy.py
"""
Monte Carlo free-energy estimators: contact density, thermodynamic integration
in h, thermodynamic integration in the coupling parameter, and the
superadditive lower bound with sampled boundaries.
"""
from __future__ import annotations
import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from field.gaussian import sample_boundary_at_height
from field.model import ModelParams, disorder_values, resolve_boundary, site_indicators, site_rewards
from models.errors import DomainError
from models.models import EstimateRecord, FreeEnergyCurve
from sampler.gibbs import DEFAULT_BURN_IN, DEFAULT_THINNING, GibbsChain
from utils.rng import derive_seed, make_rng
from utils.stats import batch_means_se, combine_replicas, cumulative_trapezoid
from .oracle import MAX_ORACLE_SITES, exact_log_Z_small

log = logging.getLogger("Wetting.free_energy")


class McmcSettings(NamedTuple):
    n_samples: int = 500
    burn_in: int = DEFAULT_BURN_IN
    thinning: int = DEFAULT_THINNING
    replicas: int = 1


def replica_disorder(params: ModelParams, seed: int, replica: int) -> np.ndarray:
    """Disorder used by the estimators in this module for one replica"""
    return disorder_values(params, seed=derive_seed(seed, "disorder", replica))


def _replica_inputs(params: ModelParams, seed: int, replica: int, boundary_values=None):
    rng = make_rng(seed, "replica", replica)
    omega = replica_disorder(params, seed, replica)
    boundary = resolve_boundary(params, rng) if boundary_values is None else boundary_values
    return rng, omega, boundary


def contact_density(
    params: ModelParams,
    mcmc: McmcSettings = McmcSettings(),
    seed: Optional[int] = None,
    boundary_values=None,
) -> EstimateRecord:
    """
    Fraction of interior sites in the contact window, averaged over heat-bath
    samples and disorder replicas.
    """
    if params.lattice.n_interior == 0:
        raise DomainError("box has no interior sites")
    seed = params.seed if seed is None else seed
    means, errors = [], []
    for r in range(mcmc.replicas):
        rng, omega, boundary = _replica_inputs(params, seed, r, boundary_values)
        chain = GibbsChain(params, rng, boundary, omega)
        series = np.array([
            site_indicators(chain.interior, params.window).delta.mean()
            for _ in chain.samples(mcmc.n_samples, mcmc.burn_in, mcmc.thinning)
        ])
        means.append(series.mean())
        errors.append(batch_means_se(series))
    value, se = combine_replicas(means, errors)
    return EstimateRecord(
        value=value, std_error=se, n_samples=mcmc.n_samples, n_replicas=mcmc.replicas,
        params=params.as_dict(), seed=seed, method="mcmc-contact",
    )


def free_energy_TI(
    params: ModelParams,
    h_grid: Sequence[float],
    h_anchor: float = -10.0,
    mcmc: McmcSettings = McmcSettings(),
) -> FreeEnergyCurve:
    """
    f(h) - f(h_anchor) per interior site: trapezoid integral of b times the contact
    density. The anchor is where the curve is pinned to zero.

    Every grid point gets its own seed, so the pointwise errors are independent
    and add in quadrature along the integral.
    """
    grid = np.unique(np.asarray(list(h_grid) + [h_anchor], dtype=float))
    if grid[0] != h_anchor:
        raise DomainError(f"h_anchor={h_anchor} must not exceed the grid minimum {min(h_grid)}")
    densities = np.empty(grid.size)
    errors = np.empty(grid.size)
    for k, h in enumerate(grid):
        rec = contact_density(params.replace(h=float(h)), mcmc, seed=derive_seed(params.seed, "ti-point", k))
        densities[k], errors[k] = rec.value, rec.std_error
        log.debug(f"h={h:.4f} contact density={rec.value:.5f} +/- {rec.std_error:.1e}")
    values, value_errors = cumulative_trapezoid(grid, params.reward * densities, params.reward * errors)
    flagged = [
        k for k in range(1, grid.size)
        if densities[k] < densities[k - 1] - 3.0 * math.hypot(errors[k], errors[k - 1])
    ]
    if flagged:
        log.warning(f"contact density decreases beyond 3 SE at h={grid[flagged].tolist()}")
    return FreeEnergyCurve(
        h_grid=grid, values=values, std_errors=value_errors, beta=params.beta, K=params.K,
        d=params.d, N=params.N, densities=densities, density_errors=errors, flagged=flagged,
    )


def contact_onset(curve: FreeEnergyCurve, threshold: float = 0.05) -> Optional[float]:
    """Smallest grid value of h where the contact density exceeds threshold"""
    if curve.densities is None:
        return None
    above = np.nonzero(curve.densities > threshold)[0]
    return float(curve.h_grid[above[0]]) if above.size else None


def log_partition_ti(
    params: ModelParams,
    boundary_values: np.ndarray,
    omega: np.ndarray,
    rng: np.random.Generator,
    n_nodes: int = 8,
    mcmc: McmcSettings = McmcSettings(),
) -> Tuple[float, float]:
    """
    Absolute log Z by integrating the mean energy over the coupling t in [0, 1],
    starting from Z = 1 at t = 0. Returns (value, standard error).
    """
    if params.hard_wall:
        raise DomainError("coupling integration needs a finite wall penalty K")
    lattice = params.lattice
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    ts = 0.5 * (nodes + 1.0)
    ws = 0.5 * weights
    rewards = site_rewards(params, omega)
    window = lattice.energy_mask
    total, variance = 0.0, 0.0
    for t, w in zip(ts, ws):
        chain = GibbsChain(params, rng, boundary_values, omega, coupling=float(t))
        energies = []
        for values in chain.samples(mcmc.n_samples, mcmc.burn_in, mcmc.thinning):
            ind = site_indicators(values[window], params.window)
            energies.append(float(np.sum(params.reward * rewards[window] * ind.delta) - params.K * np.sum(ind.rho)))
        series = np.asarray(energies)
        total += w * series.mean()
        variance += (w * batch_means_se(series)) ** 2
    return float(total), float(math.sqrt(variance))


def superadditive_lower_bound(
    params: ModelParams,
    u: float,
    replicas: int,
    mcmc: McmcSettings = McmcSettings(),
    N: Optional[int] = None,
    pad: Optional[int] = None,
    n_nodes: int = 8,
) -> EstimateRecord:
    """
    (1/|window|) E Ê^u log Z_N: boundary drawn from the free field around height u,
    averaged with the disorder. A lower bound on the free energy for every N.
    """
    if N is not None:
        params = params.replace(N=N)
    lattice = params.lattice
    exact = lattice.n_interior <= MAX_ORACLE_SITES
    if not exact and params.hard_wall:
        raise DomainError("superadditive bound beyond the oracle needs a finite K")
    values, inner_errors = [], []
    for r in range(replicas):
        rng = make_rng(params.seed, "superadd", r)
        boundary = sample_boundary_at_height(lattice, u, rng, pad)
        omega = disorder_values(params, seed=derive_seed(params.seed, "superadd-disorder", r))
        if exact:
            log_z, err = exact_log_Z_small(params, boundary, omega), 0.0
        else:
            log_z, err = log_partition_ti(params, boundary, omega, rng, n_nodes, mcmc)
        values.append(log_z / lattice.n_energy)
        inner_errors.append(err / lattice.n_energy)
    arr = np.asarray(values)
    spread = float(arr.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    inner = float(math.sqrt(np.sum(np.square(inner_errors))) / replicas)
    return EstimateRecord(
        value=float(arr.mean()), std_error=max(spread, inner), n_samples=0 if exact else mcmc.n_samples,
        n_replicas=replicas, params={**params.as_dict(), "u": u}, seed=params.seed, method="superadd",
    )
