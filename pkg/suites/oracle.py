# suites/oracle.py
"""
Exact few-site partition functions next to every Monte Carlo estimator that has an
exact counterpart, over a (beta, h, K) grid.

Each comparison is made on the disorder realisations the estimator itself used; a
Monte Carlo value further than 4 standard errors from its oracle stops the run.
"""
from __future__ import annotations
import math
from typing import List, Sequence, Tuple

import numpy as np

from config.logging_config import get_logger
from estimators.bounds import quenched_K_gap
from estimators.free_energy import McmcSettings, contact_density, log_partition_ti, replica_disorder
from estimators.oracle import (
    annealed_log_Z, exact_log_Z_small, exact_reduced_Q_small, quenched_log_Z_single_site,
)
from estimators.reduced import reduced_Q
from field.model import ModelParams, boundary_energy, resolve_boundary, site_rewards
from models.errors import InvariantViolation
from models.models import ResultRow
from runner.core import Task, model_params
from runner.output import make_row
from utils.rng import make_rng
from utils.stats import combine_replicas

log = get_logger("suites.oracle")

FD_STEP = 1e-4
# quadrature error amplified by the finite difference
FD_RESOLUTION = 1e-5
H_SPAN = 1.0
N_SIGMA = 4.0


def _interior_log_z(params: ModelParams, boundary: np.ndarray, omega: np.ndarray) -> float:
    return exact_log_Z_small(params, boundary, omega) - boundary_energy(params, boundary, omega)


def _contact_oracle(params: ModelParams, boundary: np.ndarray, omegas: Sequence[np.ndarray]) -> float:
    """Interior contact density as the centred difference of log Z in h"""
    up, down = params.replace(h=params.h + FD_STEP), params.replace(h=params.h - FD_STEP)
    slopes = [
        (_interior_log_z(up, boundary, w) - _interior_log_z(down, boundary, w)) / (2.0 * FD_STEP)
        for w in omegas
    ]
    return float(np.mean(slopes)) / (params.reward * params.lattice.n_interior)


def _check(method: str, params: ModelParams, estimate: float, se: float, oracle: float, floor: float = 1e-8) -> None:
    tolerance = N_SIGMA * se + floor * (1.0 + abs(oracle))
    if not abs(estimate - oracle) <= tolerance:
        raise InvariantViolation(
            "oracle-supremacy",
            f"{method} = {estimate} +/- {se} misses the oracle {oracle} at beta={params.beta}, h={params.h}, K={params.K}",
        )


class OracleSuite:
    name = "oracle"
    description = "exact log Z of boxes with <= 3 free sites against contact density, TI, reduced Q and the K-gap"

    def __init__(self, runner):
        self.runner = runner

    def _contact(self, params, boundary, omegas, mcmc) -> List[ResultRow]:
        rec = contact_density(params, mcmc, boundary_values=boundary)
        oracle = _contact_oracle(params, boundary, omegas)
        _check("mcmc-contact", params, rec.value, rec.std_error, oracle, FD_RESOLUTION)
        return [
            make_row(self.name, params, "oracle-diff", oracle),
            make_row(self.name, params, "mcmc-contact", rec.value, rec.std_error, rec.n_samples, rec.n_replicas),
        ]

    def _coupling_ti(self, params, boundary, omegas, mcmc, n_nodes) -> List[ResultRow]:
        single = mcmc._replace(replicas=1)
        means, errors = [], []
        for r, omega in enumerate(omegas):
            value, se = log_partition_ti(params, boundary, omega, make_rng(params.seed, "oracle-ti", r), n_nodes, single)
            means.append(value)
            errors.append(se)
        value, se = combine_replicas(means, errors)
        oracle = float(np.mean([exact_log_Z_small(params, boundary, w) for w in omegas]))
        _check("ti-coupling", params, value, se, oracle)
        return [make_row(self.name, params, "ti-coupling", value, se, mcmc.n_samples, len(omegas))]

    def _h_ti(self, params, boundary, omegas, mcmc, n_nodes) -> List[ResultRow]:
        """log Z(h) - log Z(h - H_SPAN) over the interior, integrating the contact density in h"""
        nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
        hs = params.h - H_SPAN * (1.0 - nodes) / 2.0
        ws = weights * H_SPAN / 2.0
        scale = params.reward * params.lattice.n_interior
        value, se = 0.0, 0.0
        for hk, wk in zip(hs, ws):
            # one seed for every node keeps the disorder of each replica fixed along h
            rec = contact_density(params.replace(h=float(hk)), mcmc, boundary_values=boundary)
            value += wk * scale * rec.value
            se += wk * scale * rec.std_error
        low = params.replace(h=params.h - H_SPAN)
        oracle = float(np.mean([
            _interior_log_z(params, boundary, w) - _interior_log_z(low, boundary, w) for w in omegas
        ]))
        _check("ti-h", params, value, se, oracle)
        return [make_row(self.name, params, "ti-h", value, se, mcmc.n_samples, len(omegas))]

    def _reduced(self, params, boundary, omegas, n_samples) -> List[ResultRow]:
        means, errors = [], []
        for r, omega in enumerate(omegas):
            rec = reduced_Q(params, boundary, omega, n_samples, make_rng(params.seed, "oracle-reduced", r))
            means.append(rec.value)
            errors.append(rec.std_error)
        value, se = combine_replicas(means, errors)
        oracle = float(np.mean([exact_reduced_Q_small(params, boundary, w) for w in omegas]))
        _check("reduced-q", params, value, se, oracle)
        return [
            make_row(self.name, params, "reduced-exact", oracle),
            make_row(self.name, params, "reduced-q", value, se, n_samples, len(omegas)),
        ]

    def _k_gap(self, params, boundary, omegas) -> List[ResultRow]:
        """log Z_K - log Z_inf per realisation against the per-site bound"""
        hard = params.replace(K=math.inf)
        slack = []
        for omega in omegas:
            diff = exact_log_Z_small(params, boundary, omega) - exact_log_Z_small(hard, boundary, omega)
            bound = quenched_K_gap(site_rewards(params, omega)[params.lattice.interior_slice], params.K)
            if diff > bound + 1e-9:
                raise InvariantViolation("k-gap", f"log Z_K - log Z_inf = {diff} exceeds the per-site bound {bound} at K={params.K}")
            slack.append(bound - diff)
        return [make_row(self.name, params, "kgap-quenched", float(np.mean(slack)), replicas=len(omegas))]

    def _point(self, config, beta: float, h: float, K: float) -> List[ResultRow]:
        params = model_params(config, beta=beta, h=h, K=K)
        boundary = resolve_boundary(params, make_rng(params.seed, "oracle-boundary"))
        rows = [
            make_row(self.name, params, "exact", exact_log_Z_small(params, boundary)),
            make_row(self.name, params, "annealed-exact", annealed_log_Z(params, boundary)),
        ]
        if params.lattice.n_interior == 1 and params.boundary.kind == "constant":
            rows.append(make_row(self.name, params, "quenched-exact", quenched_log_Z_single_site(params, boundary)))
        if not math.isfinite(rows[0]["value"]):
            log.warning(f"log Z = -inf at beta={beta}, h={h}, K={K}: a fixed site lies below the hard wall")
            return rows

        mcmc = McmcSettings(config.n_samples, config.burn_in, config.thinning, config.replicas)
        omegas = [replica_disorder(params, params.seed, r) for r in range(mcmc.replicas)]
        rows += self._contact(params, boundary, omegas, mcmc)
        if params.hard_wall:
            rows += self._h_ti(params, boundary, omegas, mcmc, config.ti_nodes)
        else:
            rows += self._coupling_ti(params, boundary, omegas, mcmc, config.ti_nodes)
            rows += self._k_gap(params, boundary, omegas)
        if params.window == 1.0 and params.reward == 1.0:
            rows += self._reduced(params, boundary, omegas, config.n_samples)
        log.debug(f"oracle point beta={beta} h={h} K={K} agrees within {N_SIGMA:g} SE")
        return rows

    def grid(self, config) -> List[Tuple[float, float, float]]:
        betas = config.beta_list or (config.beta,)
        hs = config.h_list or (config.h,)
        Ks = config.K_list or (config.K,)
        return [(beta, h, K) for beta in betas for h in hs for K in Ks]

    def tasks(self, config) -> List[Task]:
        return [
            Task((self.name, beta, h, K), lambda beta=beta, h=h, K=K: self._point(config, beta, h, K))
            for beta, h, K in self.grid(config)
        ]


async def setup(runner):
    runner.add_suite(OracleSuite(runner))
