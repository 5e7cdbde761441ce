# sampler/probe.py
"""
Marginal law of one site across growing centred boxes.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from field.model import ModelParams, disorder_values, resolve_boundary
from models.errors import DomainError
from utils.rng import make_rng
from utils.stats import batch_means_se
from .coupling import CoupledLadder
from .gibbs import DEFAULT_BURN_IN, DEFAULT_THINNING, GibbsChain

log = logging.getLogger("Wetting.probe")


@dataclass
class MarginalProbe:
    site: Tuple[int, ...]
    N_list: List[int]
    t_grid: np.ndarray
    cdf: np.ndarray            # shape (len(N_list), len(t_grid))
    cdf_se: np.ndarray
    mean_height: np.ndarray
    mean_height_se: np.ndarray
    n_samples: int
    coupled: bool
    sup_distance: List[float] = field(default_factory=list)

    def is_monotone(self, n_se: float = 2.0) -> bool:
        """Empirical CDF nonincreasing in N within n_se standard errors"""
        for k in range(1, len(self.N_list)):
            slack = n_se * np.hypot(self.cdf_se[k], self.cdf_se[k - 1])
            if np.any(self.cdf[k] > self.cdf[k - 1] + slack):
                return False
        return True


def marginal_probe(
    params: ModelParams,
    site: Sequence[int],
    N_list: Sequence[int],
    t_grid: Sequence[float],
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    thinning: int = DEFAULT_THINNING,
    seed: Optional[int] = None,
) -> MarginalProbe:
    """
    Empirical CDF of phi_site under the centred boxes of the sizes in N_list.

    Under the hard wall with boundary height <= 0 the boxes are run as one coupled
    ladder started from the zero field, so the samples are ordered box by box.
    Otherwise each box runs its own chain.
    """
    site = tuple(int(c) for c in site)
    sizes = sorted(set(int(n) for n in N_list), reverse=True)
    seed = params.seed if seed is None else seed
    rng = make_rng(seed, "marginal-probe")
    all_params = [params.replace(N=n, origin_mode="centered") for n in sizes]
    for p in all_params:
        if not p.lattice.is_interior(site):
            raise DomainError(f"site {site} is not interior to the centred box of size {p.N}")
    coupled = (
        params.hard_wall
        and params.boundary.kind == "constant"
        and params.boundary.height <= 0
        and len(sizes) > 1
    )
    chains = []
    for p in all_params:
        boundary = resolve_boundary(p, rng)
        init = np.zeros(p.lattice.interior_shape) if coupled else None
        chains.append(GibbsChain(p, make_rng(seed, "marginal-chain", p.N), boundary, disorder_values(p), init=init))
    ladder = CoupledLadder(chains, rng) if coupled else None

    traces = np.empty((len(sizes), n_samples))

    def advance(n: int):
        if ladder is not None:
            ladder.run(n)
        else:
            for chain in chains:
                chain.run(n)

    advance(burn_in)
    for j in range(n_samples):
        advance(thinning)
        for k, chain in enumerate(chains):
            traces[k, j] = chain.values[chain.lattice.array_index(site)]

    t = np.asarray(t_grid, dtype=float)
    cdf = np.empty((len(sizes), t.size))
    cdf_se = np.empty_like(cdf)
    for k in range(len(sizes)):
        for i, ti in enumerate(t):
            indicator = (traces[k] <= ti).astype(float)
            cdf[k, i] = indicator.mean()
            cdf_se[k, i] = max(batch_means_se(indicator), np.sqrt(max(cdf[k, i] * (1 - cdf[k, i]), 0.0) / n_samples))
    # report in increasing N
    order = np.argsort(sizes)
    sizes_inc = [sizes[i] for i in order]
    cdf, cdf_se, traces = cdf[order], cdf_se[order], traces[order]
    sup = [float(np.max(np.abs(cdf[k] - cdf[k - 1]))) for k in range(1, len(sizes_inc))]
    heights = traces.mean(axis=1)
    heights_se = np.array([batch_means_se(traces[k]) for k in range(len(sizes_inc))])
    log.info(f"marginal probe at {site}: N={sizes_inc} mean heights={np.round(heights, 4).tolist()} coupled={coupled}")
    return MarginalProbe(site, sizes_inc, t, cdf, cdf_se, heights, heights_se, n_samples, bool(coupled), sup)
