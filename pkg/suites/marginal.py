# suites/marginal.py
"""Empirical CDF of one site under growing centred boxes"""
from __future__ import annotations
from typing import List

import numpy as np

from models.models import ResultRow
from runner.core import Task, model_params
from runner.output import make_row
from sampler.probe import marginal_probe

DEFAULT_T_GRID = tuple(np.round(np.linspace(0.0, 5.0, 11), 6))


class MarginalSuite:
    name = "marginal"
    description = "P(phi_site <= t) across box sizes; decreasing in N under the hard wall"

    def __init__(self, runner):
        self.runner = runner

    def _probe(self, config) -> List[ResultRow]:
        params = model_params(config, origin_mode="centered")
        site = tuple(config.site) if config.site else (0,) * config.d
        probe = marginal_probe(params, site, config.N_list or (config.N,), config.t_grid or DEFAULT_T_GRID,
                               config.n_samples, config.burn_in, config.thinning)
        rows = []
        for k, N in enumerate(probe.N_list):
            for i, t in enumerate(probe.t_grid):
                rows.append(make_row(f"{self.name} t={float(t)!r}", params, "marginal", probe.cdf[k, i],
                                     probe.cdf_se[k, i], probe.n_samples, N=N))
            rows.append(make_row(f"{self.name} mean-height", params, "marginal", probe.mean_height[k],
                                 probe.mean_height_se[k], probe.n_samples, N=N))
        return rows

    def tasks(self, config) -> List[Task]:
        return [Task((self.name,), lambda: self._probe(config))]


async def setup(runner):
    runner.add_suite(MarginalSuite(runner))
