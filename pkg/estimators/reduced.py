# estimators/reduced.py
"""
Reduced partition function: configurations with at most one site at height <= 1.

The event probabilities only involve the free field, so they are estimated once
per boundary and reused for every disorder realisation.
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr

from field.gaussian import GaussianSolve, boundary_array
from field.model import ModelParams, disorder_values, site_rewards
from models.errors import DomainError
from utils.normal import interval_prob, truncated_ppf
from utils.rng import derive_seed
from utils.stats import sample_variance_se

log = logging.getLogger("Wetting.reduced")

MAX_REDUCED_SITES = 2_000


@dataclass
class ReducedPartition:
    value: float
    std_error: float
    p_none: float
    p_none_se: float
    p_single: np.ndarray       # P(delta_x = 1, no other site <= 1), interior sites
    p_single_se: np.ndarray
    p_contact: np.ndarray      # P(delta_x = 1)
    p_low: np.ndarray          # P(phi_x <= 1)
    p_negative: np.ndarray     # P(phi_x < 0)
    pinned_boundary: Optional[float]
    blocked: bool
    in_good_event: bool

    def q_from_rewards(self, interior_rewards: np.ndarray) -> float:
        """Q for another disorder realisation (rewards Y over the interior)"""
        if self.blocked:
            return 0.0
        if self.pinned_boundary is not None:
            return math.exp(self.pinned_boundary) * self.p_none
        return float(self.p_none + np.sum(np.exp(np.asarray(interior_rewards).ravel()) * self.p_single))


def reduced_Q(
    params: ModelParams,
    boundary_values,
    omega: Optional[np.ndarray],
    n_samples: int,
    rng: np.random.Generator,
    solver: Optional[GaussianSolve] = None,
) -> ReducedPartition:
    """
    Q = P(no window site <= 1) + sum_x exp(Y_x) P(delta_x = 1, no other site <= 1).

    P(no site <= 1) uses the union estimator (pick x with probability proportional to
    P(phi_x <= 1), condition on phi_x <= 1, weight by the number of low sites); the
    single-contact terms condition on phi_x in [0, 1]. Conditional fields are obtained
    from unconditional draws by Gaussian regression on the pinned site.
    """
    if params.window != 1.0 or params.reward != 1.0:
        raise DomainError("the reduced partition function is defined for the window [0, 1] with unit reward")
    lattice = params.lattice
    n = lattice.n_interior
    if n == 0 or n > MAX_REDUCED_SITES:
        raise DomainError(f"reduced partition function supports 1..{MAX_REDUCED_SITES} interior sites, got {n}")
    boundary = boundary_array(lattice, boundary_values) if np.isscalar(boundary_values) else np.asarray(boundary_values, dtype=float)
    if omega is None:
        omega = disorder_values(params)
    rewards = site_rewards(params, omega)

    fixed = lattice.energy_mask & lattice.boundary_mask
    low_fixed = fixed & (boundary <= 1.0)
    blocked = False
    pinned = None
    if low_fixed.sum() > 1 or np.any(low_fixed & (boundary < 0)):
        blocked = True
    elif low_fixed.sum() == 1:
        pinned = float(rewards[low_fixed][0])
    u = params.boundary.height
    in_good = bool(np.all(boundary[lattice.boundary_mask] > u / 2.0))

    solver = solver or GaussianSolve(lattice)
    mu = solver.mean(boundary)
    cov = solver.solve(np.eye(n))
    sd = np.sqrt(np.diag(cov))
    p_low = ndtr((1.0 - mu) / sd)
    p_neg = ndtr(-mu / sd)
    p_contact = interval_prob(0.0, 1.0, mu, sd)

    base = mu[:, None] + solver.fluctuations(rng, size=n_samples)  # (n, n_samples)

    def condition_on(x: int, lo: float, hi: float) -> np.ndarray:
        q = rng.random(n_samples)
        z = mu[x] + sd[x] * truncated_ppf(np.clip(q, 1e-15, 1 - 1e-15), (lo - mu[x]) / sd[x], (hi - mu[x]) / sd[x])
        z = np.clip(z, lo, hi)
        out = base + np.outer(cov[:, x] / cov[x, x], z - base[x])
        out[x] = z
        return out

    # union estimator for P(some site <= 1)
    total_low = float(p_low.sum())
    if total_low > 0:
        picks = rng.choice(n, size=n_samples, p=p_low / total_low)
        weights = np.empty(n_samples)
        for x in np.unique(picks):
            cols = np.nonzero(picks == x)[0]
            fields = condition_on(int(x), -np.inf, 1.0)[:, cols]
            weights[cols] = 1.0 / np.count_nonzero(fields <= 1.0, axis=0)
        p_union = total_low * weights.mean()
        p_union_se = total_low * weights.std(ddof=1) / math.sqrt(n_samples) if n_samples > 1 else 0.0
    else:
        p_union, p_union_se = 0.0, 0.0
    p_none = max(0.0, 1.0 - p_union)

    p_single = np.zeros(n)
    p_single_se = np.zeros(n)
    for x in range(n):
        if p_contact[x] == 0:
            continue
        fields = condition_on(x, 0.0, 1.0)
        others = np.delete(fields, x, axis=0)
        ok = np.all(others > 1.0, axis=0).astype(float)
        p_single[x] = p_contact[x] * ok.mean()
        p_single_se[x] = p_contact[x] * (ok.std(ddof=1) / math.sqrt(n_samples) if n_samples > 1 else 0.0)

    interior_rewards = rewards[lattice.interior_slice].ravel()
    result = ReducedPartition(
        value=0.0, std_error=0.0, p_none=p_none, p_none_se=float(p_union_se),
        p_single=p_single, p_single_se=p_single_se, p_contact=p_contact, p_low=p_low,
        p_negative=p_neg, pinned_boundary=pinned, blocked=blocked, in_good_event=in_good,
    )
    result.value = result.q_from_rewards(interior_rewards)
    if blocked:
        result.std_error = 0.0
    elif pinned is not None:
        result.std_error = math.exp(pinned) * float(p_union_se)
    else:
        result.std_error = float(math.sqrt(p_union_se ** 2 + np.sum((np.exp(interior_rewards) * p_single_se) ** 2)))
    if not in_good:
        log.info(f"boundary has values below u/2 = {u / 2:.3f}; outside the good event")
    return result


@dataclass
class SecondMomentReport:
    mean_q_minus_1: float
    mean_q_minus_1_se: float
    analytic_mean_q_minus_1: float
    variance: float
    variance_se: float
    analytic_variance: float
    variance_bound: float
    slack: float
    bound_holds: bool
    sandwich_lower: float
    sandwich_upper: float
    replicas: int


def second_moment_report(
    params: ModelParams,
    boundary_values,
    replicas: int,
    n_samples: int,
    rng: np.random.Generator,
) -> SecondMomentReport:
    """
    First and second moments of Q over disorder for a fixed boundary, against
    Var Q <= e^{2h} Var(xi) sum_x P(delta_x = 1)^2 and the first-moment sandwich
    (4/5) h sum P(phi <= 1) - (1 + h) sum P(phi < 0) <= E(Q - 1) <= (e^h - 1) sum P(delta = 1).
    """
    if replicas < 2:
        raise DomainError("second moment needs at least two disorder replicas")
    probs = reduced_Q(params, boundary_values, np.zeros(params.lattice.shape), n_samples, rng)
    qs = np.empty(replicas)
    for r in range(replicas):
        omega = disorder_values(params, seed=derive_seed(params.seed, "second-moment", r))
        qs[r] = probs.q_from_rewards(site_rewards(params, omega)[params.lattice.interior_slice])
    var, var_se = sample_variance_se(qs)
    var_xi = params.law.variance_xi(params.beta)
    e2h = math.exp(2.0 * params.h)
    if probs.blocked or probs.pinned_boundary is not None:
        analytic_var = 0.0 if probs.blocked else e2h * var_xi * probs.p_none ** 2
        analytic_mean = (probs.q_from_rewards(np.zeros(0)) if probs.blocked else math.exp(params.h) * probs.p_none) - 1.0
    else:
        analytic_var = e2h * var_xi * float(np.sum(probs.p_single ** 2))
        analytic_mean = probs.p_none - 1.0 + math.exp(params.h) * float(np.sum(probs.p_single))
    bound = e2h * var_xi * float(np.sum(probs.p_contact ** 2))
    holds = var <= bound + 3.0 * var_se
    lower = 0.8 * params.h * float(np.sum(probs.p_low)) - (1.0 + params.h) * float(np.sum(probs.p_negative))
    upper = math.expm1(params.h) * float(np.sum(probs.p_contact))
    log.info(f"second moment: Var Q={var:.3e} (bound {bound:.3e}), E(Q-1)={qs.mean() - 1:.3e}")
    return SecondMomentReport(
        mean_q_minus_1=float(qs.mean() - 1.0),
        mean_q_minus_1_se=float(qs.std(ddof=1) / math.sqrt(replicas)),
        analytic_mean_q_minus_1=float(analytic_mean),
        variance=var, variance_se=var_se, analytic_variance=float(analytic_var),
        variance_bound=bound, slack=float(bound - var), bound_holds=bool(holds),
        sandwich_lower=lower, sandwich_upper=upper, replicas=replicas,
    )
