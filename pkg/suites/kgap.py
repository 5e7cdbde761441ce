# suites/kgap.py
"""Cost of softening the hard wall: K-gap by quadrature and the quenched per-site bound"""
from __future__ import annotations
import math
from typing import List

from config.logging_config import get_logger
from estimators.bounds import K_gap, fit_K_gap_rate, quenched_K_gap
from estimators.oracle import MAX_ORACLE_SITES, exact_log_Z_small
from field.disorder import DisorderLaw
from field.model import disorder_values, site_rewards
from models.errors import InvariantViolation
from models.models import ResultRow
from runner.core import Task, model_params
from runner.output import make_row

log = get_logger("suites.kgap")

DEFAULT_K_LIST = (2.0, 4.0, 8.0, 12.0, 16.0, 20.0)


class KGapSuite:
    name = "kgap"
    description = "E log(1 + exp(-K + (Y)_-)) over K, its decay rate, and log Z_K - log Z_inf on small boxes"

    def __init__(self, runner):
        self.runner = runner

    def _curve(self, config) -> List[ResultRow]:
        law = DisorderLaw(config.law)
        Ks = [k for k in (config.K_list or DEFAULT_K_LIST) if math.isfinite(k)]
        params = model_params(config)
        rows = [make_row(self.name, params, "kgap-quadrature", K_gap(law, config.beta, config.h, K), K=K) for K in Ks]
        if len(Ks) >= 2:
            fit = fit_K_gap_rate(law, config.beta, config.h, Ks)
            log.info(f"K-gap decays like exp(-{fit.rate:.3f} K) for law={law.kind} beta={config.beta}")
            if not fit.rate > 0:
                raise InvariantViolation("k-gap", f"K-gap does not decay over K in {Ks}: fitted rate {fit.rate}")
            rows.append(make_row(f"{self.name} rate", params, "kgap-rate", fit.rate, K=max(Ks)))
        return rows

    def _quenched(self, config, K: float) -> List[ResultRow]:
        soft = model_params(config, K=K)
        hard = model_params(config, K=math.inf)
        omega = disorder_values(soft)
        diff = exact_log_Z_small(soft, omega=omega) - exact_log_Z_small(hard, omega=omega)
        bound = quenched_K_gap(site_rewards(soft, omega)[soft.lattice.interior_slice], K)
        if diff > bound + 1e-9:
            raise InvariantViolation("k-gap", f"log Z_K - log Z_inf = {diff} exceeds the per-site bound {bound} at K={K}")
        return [make_row(f"{self.name} quenched-slack", soft, "kgap-quenched", bound - diff)]

    def tasks(self, config) -> List[Task]:
        tasks = [Task((self.name, "curve"), lambda: self._curve(config))]
        lattice = model_params(config).lattice
        if lattice.n_interior <= MAX_ORACLE_SITES and config.boundary == "constant" and config.u >= 0:
            for K in config.K_list or DEFAULT_K_LIST:
                if math.isfinite(K):
                    tasks.append(Task((self.name, "quenched", K), lambda K=K: self._quenched(config, K)))
        return tasks


async def setup(runner):
    runner.add_suite(KGapSuite(runner))
