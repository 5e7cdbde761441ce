# estimators/bounds.py
"""
Closed-form quantities from the small-h analysis: Jensen lower bounds, the
one-site gain, tail ratios, the K-gap and the scaling probe.

All heights are physical heights of a N(u, sigma^2) site, not standardised.
"""
from __future__ import annotations
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.special import log_ndtr

from field.disorder import DisorderLaw
from models.errors import DomainError
from models.models import EstimateRecord
from utils.normal import interval_prob, log_interval_prob, log_mass

log = logging.getLogger("Wetting.bounds")


def _log1mexp(x: float) -> float:
    """log(1 - e^x) for x < 0"""
    return math.log(-math.expm1(x)) if x > -math.log(2.0) else math.log1p(-math.exp(x))


def _check(h: float, K: float, sigma: float) -> None:
    if not 0 < h < 1:
        raise DomainError(f"small-h bounds need 0 < h < 1, got {h}")
    if not K >= 0:
        raise DomainError(f"K must lie in [0, inf], got {K}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")


# --- Jensen lower bound ---

def log_jensen_lower_bound(u: float, h: float, K: float, sigma: float) -> float:
    """log of h P(phi in [0,1]) - K P(phi < 0); -inf where the bound is not positive"""
    gain = math.log(h) + float(log_interval_prob(0.0, 1.0, u, sigma))
    if math.isinf(K):
        return -math.inf if float(log_ndtr(-u / sigma)) > -math.inf else gain
    if K == 0:
        return gain
    loss = math.log(K) + float(log_ndtr(-u / sigma))
    if loss >= gain:
        return -math.inf
    return gain + _log1mexp(loss - gain)


def jensen_lower_bound(u: float, h: float, K: float, sigma: float) -> float:
    """f >= h P(phi in [0, 1]) - K P(phi < 0) for phi ~ N(u, sigma^2)"""
    gain = h * math.exp(float(log_interval_prob(0.0, 1.0, u, sigma)))
    loss = K * math.exp(float(log_ndtr(-u / sigma)))
    return gain - loss


def jensen_optimal_height(h: float, K: float, sigma: float) -> float:
    """Height sigma^2 log(1/h) + sigma r with r = 1/(2 sigma) + sigma log(4 (K + 1))"""
    _check(h, K, sigma)
    r = 1.0 / (2.0 * sigma) + sigma * math.log(4.0 * (K + 1.0))
    return sigma * sigma * math.log(1.0 / h) + sigma * r


def log_explicit_lower_bound(h: float, K: float, sigma: float) -> float:
    """
    log of the closed-form bound at the explicit height.

    Its ratio -log f / log(1/h)^2 approaches sigma^2 / 2 slowly: with the centre
    variance of the implemented field (sigma_3^2 ~ 0.2527) it is still about 50%
    above the limit at h = e^-20. The thresholds quoted for this ratio assume the
    walk normalisation 2 d sigma^2; see "sigma_d^2 normalisation" in DESIGN.md.
    Only the monotone approach is checked.
    """
    _check(h, K, sigma)
    L = math.log(1.0 / h)
    r = 1.0 / (2.0 * sigma) + sigma * math.log(4.0 * (K + 1.0))
    return (
        math.log(2.0)
        + (0.5 + sigma * sigma * math.log(4.0 * (K + 1.0))) * math.log(h)
        - 0.5 * r * r
        - math.log((r + sigma * L) * math.sqrt(2.0 * math.pi))
        - 0.5 * sigma * sigma * L * L
    )


def explicit_lower_bound(h: float, K: float, sigma: float) -> float:
    """Closed-form lower bound obtained from the Jensen bound at the explicit height"""
    return math.exp(log_explicit_lower_bound(h, K, sigma))


class MaximizedBound(NamedTuple):
    height: float
    log_value: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def maximized_jensen_bound(h: float, K: float, sigma: float) -> MaximizedBound:
    """Jensen bound maximised numerically over the height"""
    _check(h, K, sigma)
    center = jensen_optimal_height(h, K, sigma)
    grid = np.linspace(max(center - 6.0 * sigma - 2.0, 0.0), center + 6.0 * sigma + 2.0, 801)
    logs = np.array([log_jensen_lower_bound(float(u), h, K, sigma) for u in grid])
    if not np.isfinite(logs).any():
        return MaximizedBound(center, -math.inf)
    k = int(np.argmax(logs))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda u: -log_jensen_lower_bound(u, h, K, sigma), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-10},
    )
    if res.success and -res.fun >= logs[k]:
        return MaximizedBound(float(res.x), float(-res.fun))
    return MaximizedBound(float(grid[k]), float(logs[k]))


# --- one-site gain ---

class OnesiteQuantities(NamedTuple):
    exact_value: float
    exact_gain: float
    approx_gain: float
    predicted: float
    bracket: float
    relative_gap: float


def onesite_quantities(u: float, h: float, K: float, sigma: float) -> OnesiteQuantities:
    """
    One site phi ~ N(u, sigma^2): E[exp(h 1[0,1](phi) - K 1(phi<0))], its gain over 1,
    the large-u approximation of the gain and the predicted order
    exp(-sigma^2 log(1/h)^2 / 2).

    The exact value is defined for every real h and K in [0, inf]. The approximation,
    prediction, bracket and gap need 0 < h < 1 and u > 1 and are nan otherwise; there
    both gains are computed relative to sigma/(u sqrt(2 pi)) exp(-u^2 / (2 sigma^2)) so
    that the relative gap stays finite when the gains underflow.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if not K >= 0:
        raise DomainError(f"K must lie in [0, inf], got {K}")
    wall = 0.0 if math.isinf(K) else math.exp(-K)
    p_contact = float(interval_prob(0.0, 1.0, u, sigma))
    p_neg = math.exp(float(log_ndtr(-u / sigma)))
    gain = math.expm1(h) * p_contact + (wall - 1.0) * p_neg
    if not (0 < h < 1 and u > 1):
        return OnesiteQuantities(1.0 + gain, gain, math.nan, math.nan, math.nan, math.nan)
    log_scale = math.log(sigma / (u * math.sqrt(2.0 * math.pi))) - u * u / (2.0 * sigma * sigma)
    log_p_le1 = float(log_ndtr((1.0 - u) / sigma))
    log_p_neg = float(log_ndtr(-u / sigma))
    scaled_exact = math.expm1(h) * math.exp(log_p_le1 - log_scale) - (math.exp(h) - wall) * math.exp(log_p_neg - log_scale)
    bracket = math.exp(math.log(h) + u / sigma ** 2 - 1.0 / (2.0 * sigma ** 2)) - (1.0 - wall)
    gap = abs(scaled_exact - bracket) / abs(scaled_exact) if scaled_exact != 0 else math.inf
    L = math.log(1.0 / h)
    return OnesiteQuantities(
        exact_value=1.0 + gain,
        exact_gain=scaled_exact * math.exp(log_scale),
        approx_gain=bracket * math.exp(log_scale),
        predicted=math.exp(-0.5 * sigma * sigma * L * L),
        bracket=bracket,
        relative_gap=gap,
    )


def bracket_root(h: float, K: float, sigma: float) -> float:
    """Height where the one-site bracket changes sign"""
    _check(h, K, sigma)
    if K == 0:
        raise DomainError("the bracket keeps one sign without a wall penalty")
    wall = 0.0 if math.isinf(K) else math.exp(-K)
    return sigma * sigma * (math.log((1.0 - wall) / h)) + 0.5


# --- tail ratios ---

def log_ratio_estimate(u: float, sigma: float) -> float:
    return float(log_ndtr((1.0 - u) / sigma) - log_ndtr(-u / sigma))


def ratio_estimate(u: float, sigma: float) -> float:
    """P(phi <= 1) / P(phi < 0) for phi ~ N(u, sigma^2)"""
    return math.exp(log_ratio_estimate(u, sigma))


class NormalizedRatio(NamedTuple):
    height: float
    normalized: float
    corrected: float


def normalized_ratio(a_tilde: float, h: float, sigma: float) -> NormalizedRatio:
    """
    The ratio at u = a sigma^2 log(1/h) divided by h^{-a} exp(-1/(2 sigma^2)).
    `corrected` also removes the first-order prefactor u / (u - 1).
    """
    if not 0 < h < 1:
        raise DomainError(f"need 0 < h < 1, got {h}")
    L = math.log(1.0 / h)
    u = a_tilde * sigma * sigma * L
    if u <= 1:
        raise DomainError(f"height {u} must exceed 1")
    norm = math.exp(log_ratio_estimate(u, sigma) - a_tilde * L + 1.0 / (2.0 * sigma * sigma))
    return NormalizedRatio(u, norm, norm * (u - 1.0) / u)


def p_over_p(u, a: float):
    """P(-u, -u + a) / P(-inf, -u) for a standard normal"""
    u = np.asarray(u, dtype=float)
    return np.exp(log_mass(-u, -u + a) - log_ndtr(-u))


def p_over_p_asymptote(u, a: float):
    """exp(a u - a^2 / 2)"""
    return np.exp(a * np.asarray(u, dtype=float) - 0.5 * a * a)


# --- K-gap ---

def K_gap(law: DisorderLaw, beta: float, h: float, K: float) -> float:
    """E log(1 + exp(-K + (Y)_-)) with Y = beta omega - lambda(beta) + h"""
    if not K >= 0:
        raise DomainError(f"K must lie in [0, inf], got {K}")
    if math.isinf(K):
        return 0.0
    lam_b = law.lam(beta)

    def site(w: float) -> float:
        y = beta * w - lam_b + h
        return float(np.logaddexp(0.0, -K + max(-y, 0.0)))

    if beta == 0:
        return site(0.0)
    return law.expect(site, breakpoints=((lam_b - h) / beta,))


def quenched_K_gap(rewards, K: float) -> float:
    """Sum over sites of log(1 + exp(-K + (Y_x)_-)): bounds log Z_K - log Z_inf for fixed disorder"""
    y = np.asarray(rewards, dtype=float)
    return float(np.sum(np.logaddexp(0.0, -K + np.maximum(-y, 0.0))))


class KGapFit(NamedTuple):
    rate: float
    intercept: float
    Ks: np.ndarray
    values: np.ndarray


def fit_K_gap_rate(law: DisorderLaw, beta: float, h: float, Ks: Sequence[float]) -> KGapFit:
    """Least-squares rate c in K_gap(K) ~ C exp(-c K)"""
    Ks = np.asarray(Ks, dtype=float)
    values = np.array([K_gap(law, beta, h, k) for k in Ks])
    keep = values > 0
    if keep.sum() < 2:
        raise DomainError("K-gap underflows on the whole K grid")
    slope, intercept = np.polyfit(Ks[keep], np.log(values[keep]), 1)
    return KGapFit(float(-slope), float(intercept), Ks, values)


# --- scaling probe ---

class ScalingRow(NamedTuple):
    h: float
    log_inv_h: float
    explicit_ratio: float
    jensen_ratio: float
    jensen_height: float
    simulated_ratio: Optional[float]
    simulated_resolvable: Optional[bool]
    log_predicted: float
    log_predicted_over_h10: float
    target: float


def scaling_probe(
    beta: float,
    K: float,
    h_list: Sequence[float],
    sigma: float,
    simulated: Optional[Dict[float, EstimateRecord]] = None,
) -> List[ScalingRow]:
    """
    -log f / log(1/h)^2 from the explicit bound and from the maximised Jensen bound;
    both tend to sigma^2 / 2. Simulated estimates, when given, are reported with a
    flag telling whether they are resolved from zero at two standard errors.
    The explicit ratio converges slowly; see log_explicit_lower_bound.
    """
    rows = []
    for h in sorted(h_list, reverse=True):
        L = math.log(1.0 / h)
        explicit = -log_explicit_lower_bound(h, K, sigma) / (L * L)
        best = maximized_jensen_bound(h, K, sigma)
        sim_ratio, resolvable = None, None
        if simulated and h in simulated:
            rec = simulated[h]
            resolvable = rec.value > 2.0 * rec.std_error
            sim_ratio = -math.log(rec.value) / (L * L) if rec.value > 0 else math.nan
        log_pred = -0.5 * sigma * sigma * L * L
        rows.append(ScalingRow(
            h=h, log_inv_h=L, explicit_ratio=explicit, jensen_ratio=-best.log_value / (L * L),
            jensen_height=best.height, simulated_ratio=sim_ratio, simulated_resolvable=resolvable,
            log_predicted=log_pred, log_predicted_over_h10=log_pred + 10.0 * L, target=0.5 * sigma * sigma,
        ))
        log.debug(f"scaling h={h:.3e}: explicit={explicit:.4f} jensen={rows[-1].jensen_ratio:.4f}")
    return rows


# Conjecture, not a theorem: reported with the CONJECTURE tag by the scaling suite.
def delta_pinning_conjecture(J, sigma: float):
    """exp(-(sigma^2 / 2) exp(-2 J)) for the delta-pinning strength J"""
    return np.exp(-0.5 * sigma * sigma * np.exp(-2.0 * np.asarray(J, dtype=float)))


def window_exponent(a: float, sigma: float) -> float:
    """Constant in f ~ exp(-c log(1/h)^2) for the contact window [0, a]"""
    if a <= 0:
        raise DomainError(f"window must be positive, got {a}")
    return sigma * sigma / (2.0 * a * a)
