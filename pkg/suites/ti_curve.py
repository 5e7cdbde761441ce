# suites/ti_curve.py
"""Free-energy curve f(h) by thermodynamic integration of the contact density"""
from __future__ import annotations
from typing import List

from config.logging_config import get_logger
from estimators.free_energy import McmcSettings, contact_onset, free_energy_TI
from models.models import ResultRow
from runner.core import Task, model_params
from runner.output import make_row

log = get_logger("suites.ti_curve")


class TICurveSuite:
    name = "ti-curve"
    description = "f(h) - f(h_anchor) per interior site by trapezoid integration of the contact density"

    def __init__(self, runner):
        self.runner = runner

    def _curve(self, config, beta: float) -> List[ResultRow]:
        params = model_params(config, beta=beta)
        mcmc = McmcSettings(config.n_samples, config.burn_in, config.thinning, config.replicas)
        h_grid = config.h_list or (config.h,)
        curve = free_energy_TI(params, h_grid, config.h_anchor, mcmc)
        rows = []
        for k, h in enumerate(curve.h_grid):
            rows.append(make_row(self.name, params, "ti-h", curve.values[k], curve.std_errors[k],
                                 config.n_samples, config.replicas, h=float(h)))
            rows.append(make_row(self.name, params, "mcmc-contact", curve.densities[k], curve.density_errors[k],
                                 config.n_samples, config.replicas, h=float(h)))
        onset = contact_onset(curve)
        log.info(f"beta={beta}: contact density exceeds 0.05 from h={onset}; non-monotone points: {curve.flagged}")
        return rows

    def tasks(self, config) -> List[Task]:
        betas = config.beta_list or (config.beta,)
        return [Task((self.name, beta), lambda beta=beta: self._curve(config, beta)) for beta in betas]


async def setup(runner):
    runner.add_suite(TICurveSuite(runner))
