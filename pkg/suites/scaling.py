# suites/scaling.py
"""Small-h asymptotics: sigma_d^2, Jensen bounds, simulated bound, one-site gain, tail ratio, conjecture"""
from __future__ import annotations
import math
from typing import Dict, List, Tuple

from config.logging_config import get_logger
from estimators.bounds import (
    delta_pinning_conjecture, jensen_optimal_height, maximized_jensen_bound, normalized_ratio,
    onesite_quantities, scaling_probe,
)
from estimators.free_energy import McmcSettings, superadditive_lower_bound
from field.gaussian import sigma_d_sq, sigma_d_sq_walk
from models.errors import InvariantViolation
from models.models import EstimateRecord, ResultRow
from runner.core import Task, model_params
from runner.output import make_row
from utils.rng import make_rng

log = get_logger("suites.scaling")

DEFAULT_H_LIST = tuple(math.exp(-k) for k in (4, 8, 12, 16, 20))
CONJECTURE_J = (0.0, 0.5, 1.0)
RATIO_EXPONENT = 1.5
WALKS = 40_000
# below this the Jensen bound is lost in the boundary-sampling noise
SIMULATION_FLOOR = 1e-4


class ScalingSuite:
    name = "scaling"
    description = "-log f / log(1/h)^2 from the explicit, maximised and simulated Jensen bounds against sigma_d^2 / 2"

    def __init__(self, runner):
        self.runner = runner

    def _sigma(self, config, params) -> Tuple[float, List[ResultRow]]:
        estimate = sigma_d_sq(config.d, tuple(config.sigma_levels))
        levels = tuple(sorted(config.sigma_levels)[-2:])
        walk, walk_error = sigma_d_sq_walk(config.d, levels, WALKS, make_rng(config.seed, "sigma-walk"))
        combined = math.hypot(walk_error, estimate.error)
        if abs(walk - estimate.value) > 4.0 * combined:
            raise InvariantViolation(
                "sigma-walk", f"killed walks give {walk} +/- {walk_error}, the Green function {estimate.value} +/- {estimate.error}"
            )
        rows = [
            make_row(f"{self.name} sigma", params, "sigma", estimate.value, estimate.error),
            make_row(f"{self.name} sigma", params, "sigma-walk", walk, walk_error, WALKS),
        ]
        return math.sqrt(estimate.value), rows

    def _simulate(self, config, params, h_list, K: float, sigma: float) -> Dict[float, EstimateRecord]:
        """Superadditive estimate at the Jensen height for every h whose bound is large enough to resolve"""
        mcmc = McmcSettings(config.n_samples, config.burn_in, config.thinning, 1)
        out = {}
        for h in h_list:
            if maximized_jensen_bound(h, K, sigma).value < SIMULATION_FLOOR:
                continue
            u = jensen_optimal_height(h, K, sigma)
            out[h] = superadditive_lower_bound(
                params.replace(h=h, K=K), u, config.replicas, mcmc, pad=config.pad, n_nodes=config.ti_nodes,
            )
        log.debug(f"simulated the bound at {len(out)} of {len(h_list)} h value(s)")
        return out

    def _scaling(self, config) -> List[ResultRow]:
        params = model_params(config)
        sigma, rows = self._sigma(config, params)
        K = config.K if math.isfinite(config.K) else 1.0
        h_list = [h for h in (config.h_list or DEFAULT_H_LIST) if 0 < h < 1]
        simulated = self._simulate(config, params, h_list, K, sigma)
        for row in scaling_probe(config.beta, K, h_list, sigma, simulated=simulated):
            rows.append(make_row(self.name, params, "jensen-explicit", row.explicit_ratio, h=row.h, K=K))
            rows.append(make_row(self.name, params, "jensen-max", row.jensen_ratio, h=row.h, K=K))
            if row.simulated_ratio is not None:
                rec = simulated[row.h]
                se = rec.std_error / (abs(rec.value) * row.log_inv_h ** 2) if rec.value != 0 else math.inf
                tag = "simulated" if row.simulated_resolvable else "simulated unresolved"
                rows.append(make_row(
                    f"{self.name} {tag}", params, "simulated", row.simulated_ratio, se,
                    rec.n_samples, rec.n_replicas, h=row.h, K=K,
                ))
            u = jensen_optimal_height(row.h, K, sigma)
            if u > 1:
                rows.append(make_row(self.name, params, "onesite", onesite_quantities(u, row.h, K, sigma).relative_gap, h=row.h, K=K))
            try:
                ratio = normalized_ratio(RATIO_EXPONENT, row.h, sigma)
                rows.append(make_row(self.name, params, "ratio", ratio.normalized, h=row.h, K=K))
            except ValueError:
                pass
        for J in CONJECTURE_J:
            rows.append(make_row(f"{self.name} J={J}", params, "conjecture", float(delta_pinning_conjecture(J, sigma))))
        return rows

    def tasks(self, config) -> List[Task]:
        return [Task((self.name,), lambda: self._scaling(config))]


async def setup(runner):
    runner.add_suite(ScalingSuite(runner))
