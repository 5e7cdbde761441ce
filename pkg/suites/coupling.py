# suites/coupling.py
"""Monotone coupling checks: ordered initial fields on one box, and nested boxes"""
from __future__ import annotations
from typing import List

import numpy as np

from field.model import disorder_values, resolve_boundary
from models.models import ResultRow
from runner.core import Task, model_params
from runner.output import make_row
from sampler.coupling import CoupledPair
from sampler.gibbs import GibbsChain
from utils.rng import make_rng


class CouplingSuite:
    name = "coupling"
    description = "coupled heat-bath chains stay ordered (same box shifted by one, nested hard-wall boxes)"

    def __init__(self, runner):
        self.runner = runner

    def _shifted(self, config) -> List[ResultRow]:
        params = model_params(config)
        rng = make_rng(config.seed, self.name, "shifted")
        boundary = resolve_boundary(params, rng)
        omega = disorder_values(params)
        upper = GibbsChain(params, make_rng(config.seed, self.name, "upper"), boundary, omega)
        upper.run(config.burn_in)
        lower_boundary = boundary - 1.0
        lower = GibbsChain(params, make_rng(config.seed, self.name, "lower"), lower_boundary, omega, init=upper.interior - 1.0)
        pair = CoupledPair(upper, lower, rng)
        gaps = []
        for _ in range(config.n_samples):
            pair.sweep()
            gaps.append(float(np.min(upper.values - lower.values)))
        return [make_row(f"{self.name} shifted", params, "coupling", min(gaps), 0.0, config.n_samples)]

    def _nested(self, config, small: int, large: int) -> List[ResultRow]:
        big = model_params(config, N=large, origin_mode="centered")
        little = model_params(config, N=small, origin_mode="centered")
        rng = make_rng(config.seed, self.name, "nested", small, large)
        chains = [
            GibbsChain(p, rng, resolve_boundary(p, rng), disorder_values(p), init=np.zeros(p.lattice.interior_shape))
            for p in (big, little)
        ]
        pair = CoupledPair(chains[0], chains[1], rng)
        site = little.lattice.center()
        upper_trace, lower_trace = [], []
        pair.run(config.burn_in)
        for _ in range(config.n_samples):
            pair.sweep()
            upper_trace.append(pair.upper.values[big.lattice.array_index(site)])
            lower_trace.append(pair.lower.values[little.lattice.array_index(site)])
        diff = float(np.mean(upper_trace) - np.mean(lower_trace))
        return [make_row(f"{self.name} nested {small}<{large}", big, "coupling", diff, 0.0, config.n_samples)]

    def tasks(self, config) -> List[Task]:
        tasks = [Task((self.name, "shifted"), lambda: self._shifted(config))]
        sizes = sorted(config.N_list)
        if config.K == float("inf") and config.u <= 0 and config.boundary == "constant":
            for small, large in zip(sizes[:-1], sizes[1:]):
                tasks.append(Task((self.name, small, large), lambda s=small, l=large: self._nested(config, s, l)))
        return tasks


async def setup(runner):
    runner.add_suite(CouplingSuite(runner))
