# suites/second_moment.py
"""Reduced partition function and its variance over disorder"""
from __future__ import annotations
from typing import List

from estimators.reduced import reduced_Q, second_moment_report
from field.model import resolve_boundary
from models.errors import InvariantViolation
from models.models import ResultRow
from runner.core import Task, model_params
from runner.output import make_row
from utils.rng import make_rng


class SecondMomentSuite:
    name = "second-moment"
    description = "Q and Var Q against e^{2h} Var(xi) sum P(delta_x = 1)^2, first-moment sandwich"

    def __init__(self, runner):
        self.runner = runner

    def _point(self, config, h: float) -> List[ResultRow]:
        params = model_params(config, h=h)
        rng = make_rng(config.seed, self.name, h)
        boundary = resolve_boundary(params, rng)
        q = reduced_Q(params, boundary, None, config.n_samples, rng)
        replicas = max(config.replicas, 2)
        report = second_moment_report(params, boundary, replicas, config.n_samples, rng)
        if not report.bound_holds:
            raise InvariantViolation(
                "variance-bound", f"Var Q = {report.variance} exceeds {report.variance_bound} + 3 SE at h={h}"
            )
        return [
            make_row(self.name, params, "reduced-q", q.value, q.std_error, config.n_samples),
            make_row(f"{self.name} mean", params, "reduced-q", report.mean_q_minus_1, report.mean_q_minus_1_se,
                     config.n_samples, replicas),
            make_row(f"{self.name} variance", params, "variance-bound", report.variance, report.variance_se,
                     config.n_samples, replicas),
            make_row(f"{self.name} bound", params, "variance-bound", report.variance_bound, 0.0,
                     config.n_samples, replicas),
        ]

    def tasks(self, config) -> List[Task]:
        return [Task((self.name, h), lambda h=h: self._point(config, h)) for h in (config.h_list or (config.h,))]


async def setup(runner):
    runner.add_suite(SecondMomentSuite(runner))
