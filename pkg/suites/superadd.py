# suites/superadd.py
"""Superadditive lower bound (1/|window|) E Ê^u log Z_N with sampled boundaries"""
from __future__ import annotations
from typing import List

from estimators.free_energy import McmcSettings, superadditive_lower_bound
from models.models import ResultRow
from runner.core import Task, model_params
from runner.output import make_row


class SuperaddSuite:
    name = "superadd"
    description = "lower bound on f from boxes with boundary sampled around height u"

    def __init__(self, runner):
        self.runner = runner

    def _point(self, config, N: int, h: float) -> List[ResultRow]:
        params = model_params(config, N=N, h=h)
        mcmc = McmcSettings(config.n_samples, config.burn_in, config.thinning, 1)
        rec = superadditive_lower_bound(params, config.u, config.replicas, mcmc, pad=config.pad, n_nodes=config.ti_nodes)
        return [make_row(self.name, params, "superadd", rec.value, rec.std_error, rec.n_samples, rec.n_replicas)]

    def tasks(self, config) -> List[Task]:
        sizes = config.N_list or (config.N,)
        hs = config.h_list or (config.h,)
        return [
            Task((self.name, N, h), lambda N=N, h=h: self._point(config, N, h))
            for N in sizes for h in hs
        ]


async def setup(runner):
    runner.add_suite(SuperaddSuite(runner))
