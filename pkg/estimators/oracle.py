# estimators/oracle.py
"""
Exact partition functions for boxes with at most three free sites.

The site factors are piecewise constant in phi (on (-inf, 0), [0, a], (a, inf)),
so the Gaussian expectation is computed by conditioning the sites one after the
other: the last site is integrated in closed form, the others by adaptive
quadrature split at the piece boundaries.
"""
from __future__ import annotations
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import logsumexp, ndtr
from scipy.stats import norm

from field.gaussian import boundary_array
from field.model import ModelParams, boundary_energy, disorder_values, resolve_boundary, site_rewards
from models.errors import OracleRefused
from utils.normal import log_interval_prob
from utils.rng import make_rng

log = logging.getLogger("Wetting.oracle")

MAX_ORACLE_SITES = 3

Piece = Tuple[float, float, float]  # (lo, hi, log factor)


def _pieces(params: ModelParams, reward: float, coupling: float = 1.0) -> List[Piece]:
    pieces = []
    if not params.hard_wall:
        pieces.append((-np.inf, 0.0, -coupling * params.K))
    pieces.append((0.0, params.window, coupling * params.reward * reward))
    pieces.append((params.window, np.inf, 0.0))
    return pieces


def _split(lo: float, hi: float, centre: float, scale: float) -> List[Tuple[float, float]]:
    """Cut (lo, hi) at centre and centre +/- 8 scale so quad sees the bulk of the density"""
    cuts = [c for c in (centre - 8 * scale, centre, centre + 8 * scale) if lo < c < hi]
    edges = [lo] + cuts + [hi]
    return list(zip(edges[:-1], edges[1:]))


class _SequentialGaussian:
    """Conditional means/variances of X_k given X_0..X_{k-1} for X ~ N(mu, cov)"""

    def __init__(self, mu: np.ndarray, cov: np.ndarray):
        self.mu = mu
        self.n = mu.size
        self.coef = []
        self.sd = []
        for k in range(self.n):
            if k == 0:
                c = np.zeros(0)
                v = cov[0, 0]
            else:
                c = np.linalg.solve(cov[:k, :k], cov[:k, k])
                v = cov[k, k] - cov[k, :k] @ c
            self.coef.append(c)
            self.sd.append(math.sqrt(v))

    def conditional(self, k: int, prefix: Sequence[float]) -> Tuple[float, float]:
        mean = self.mu[k] + (self.coef[k] @ (np.asarray(prefix) - self.mu[:k]) if k else 0.0)
        return float(mean), self.sd[k]


def _closed_form(mean: float, sd: float, pieces: List[Piece]) -> float:
    """E g(X) for X ~ N(mean, sd^2) and piecewise-constant g"""
    total = 0.0
    for lo, hi, lw in pieces:
        a = (lo - mean) / sd
        b = (hi - mean) / sd
        mass = ndtr(b) - ndtr(a) if a < 0 else ndtr(-a) - ndtr(-b)
        total += math.exp(lw) * mass
    return float(total)


def _expectation(gauss: _SequentialGaussian, pieces: List[List[Piece]], level: int, prefix: List[float]) -> float:
    mean, sd = gauss.conditional(level, prefix)
    if level == gauss.n - 1:
        return _closed_form(mean, sd, pieces[level])
    total = 0.0
    for lo, hi, lw in pieces[level]:
        for a, b in _split(lo, hi, mean, sd):
            value, _ = integrate.quad(
                lambda x: norm.pdf(x, mean, sd) * _expectation(gauss, pieces, level + 1, prefix + [x]),
                a, b, epsabs=1e-14, epsrel=1e-12, limit=200,
            )
            total += math.exp(lw) * value
    return total


def _interior_gaussian(params: ModelParams, boundary: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lattice = params.lattice
    precision = lattice.dirichlet_laplacian().toarray()
    cov = np.linalg.inv(precision)
    mu = cov @ lattice.boundary_drive(boundary)
    return mu, cov


def _log_Z(params: ModelParams, boundary: np.ndarray, rewards: np.ndarray, coupling: float = 1.0) -> float:
    lattice = params.lattice
    if lattice.n_interior > MAX_ORACLE_SITES:
        raise OracleRefused(
            f"exact oracle handles at most {MAX_ORACLE_SITES} interior sites, {lattice} has {lattice.n_interior}"
        )
    const = _boundary_part(params, boundary, rewards)
    if not np.isfinite(const):
        return -np.inf
    const *= coupling
    mu, cov = _interior_gaussian(params, boundary)
    interior_rewards = rewards[lattice.interior_slice].ravel()
    pieces = [_pieces(params, float(y), coupling) for y in interior_rewards]
    expectation = _expectation(_SequentialGaussian(mu, cov), pieces, 0, [])
    return const + math.log(expectation)


def _boundary_part(params: ModelParams, boundary: np.ndarray, rewards: np.ndarray) -> float:
    lattice = params.lattice
    values = boundary
    fixed = lattice.energy_mask & lattice.boundary_mask
    delta = (values >= 0) & (values <= params.window)
    below = values < 0
    if params.hard_wall and np.any(below & fixed):
        return -np.inf
    energy = params.reward * rewards * delta - (0.0 if params.hard_wall else params.K) * below
    return float(np.sum(energy[fixed]))


def _resolve_inputs(params, boundary_values, omega):
    if boundary_values is None:
        boundary_values = resolve_boundary(params, make_rng(params.seed, "oracle-boundary"))
    boundary = boundary_array(params.lattice, boundary_values) if np.isscalar(boundary_values) else np.asarray(boundary_values, dtype=float)
    if omega is None:
        omega = disorder_values(params)
    return boundary, np.asarray(omega, dtype=float)


def exact_log_Z_small(
    params: ModelParams,
    boundary_values=None,
    omega: Optional[np.ndarray] = None,
    coupling: float = 1.0,
) -> float:
    """
    log Z for a box with at most three interior sites.

    Args:
        params: model parameters (the box must have <= 3 interior sites)
        boundary_values: scalar height or full-box array; defaults to params.boundary
        omega: disorder over the box; defaults to the field seeded by params.seed
        coupling: scale t of the pinning reward and wall penalty

    Returns:
        log Z, or -inf when a fixed site lies below a hard wall
    """
    boundary, omega = _resolve_inputs(params, boundary_values, omega)
    return _log_Z(params, boundary, site_rewards(params, omega), coupling)


def quenched_log_Z_single_site(params: ModelParams, boundary_values=None) -> float:
    """E_omega log Z for a box with one interior site"""
    if params.lattice.n_interior != 1:
        raise OracleRefused(f"quenched oracle needs exactly one interior site, {params.lattice} has {params.lattice.n_interior}")
    boundary, _ = _resolve_inputs(params, boundary_values, np.zeros(params.lattice.shape))
    mean_rewards = np.full(params.lattice.shape, params.h - params.lam)
    const = _boundary_part(params, boundary, mean_rewards)
    if not np.isfinite(const):
        return -np.inf
    mu, cov = _interior_gaussian(params, boundary)
    mean, sd = float(mu[0]), math.sqrt(cov[0, 0])
    if params.beta == 0:
        pieces = _pieces(params, params.h)
        return const + float(logsumexp([lw + log_interval_prob(lo, hi, mean, sd) for lo, hi, lw in pieces]))

    def log_site(w: float) -> float:
        y = params.beta * w - params.lam + params.h
        return float(logsumexp([lw + log_interval_prob(lo, hi, mean, sd) for lo, hi, lw in _pieces(params, y)]))

    return const + params.law.expect(log_site)


def annealed_log_Z(params: ModelParams, boundary_values=None) -> float:
    """
    log E Z: with independent sites the disorder average replaces Y_x by
    h + (lambda(b beta) - b lambda(beta)) / b.
    """
    b = params.reward
    if not params.law.in_domain(b * params.beta):
        return np.inf
    boundary, _ = _resolve_inputs(params, boundary_values, np.zeros(params.lattice.shape))
    effective = params.h + (params.law.lam(b * params.beta) - b * params.lam) / b
    return _log_Z(params, boundary, np.full(params.lattice.shape, effective))



def exact_reduced_Q_small(
    params: ModelParams,
    boundary_values=None,
    omega: Optional[np.ndarray] = None,
) -> float:
    """
    Reduced partition function Q of a box with at most three interior sites, by the
    same sequential quadrature as exact_log_Z_small. Follows reduced_Q for fixed
    window sites: two low fixed sites (or one below zero) give 0, a single fixed
    contact multiplies P(no interior site <= 1) by its exp(Y).
    """
    lattice = params.lattice
    if lattice.n_interior > MAX_ORACLE_SITES:
        raise OracleRefused(
            f"exact oracle handles at most {MAX_ORACLE_SITES} interior sites, {lattice} has {lattice.n_interior}"
        )
    boundary, omega = _resolve_inputs(params, boundary_values, omega)
    rewards = site_rewards(params, omega)
    fixed = lattice.energy_mask & lattice.boundary_mask
    low_fixed = fixed & (boundary <= 1.0)
    if low_fixed.sum() > 1 or np.any(low_fixed & (boundary < 0)):
        return 0.0
    gauss = _SequentialGaussian(*_interior_gaussian(params, boundary))
    high: Piece = (1.0, np.inf, 0.0)
    p_none = _expectation(gauss, [[high]] * gauss.n, 0, [])
    if low_fixed.sum() == 1:
        return math.exp(float(rewards[low_fixed][0])) * p_none
    interior_rewards = rewards[lattice.interior_slice].ravel()
    total = p_none
    for x, y in enumerate(interior_rewards):
        pieces = [[high]] * gauss.n
        pieces[x] = [(0.0, 1.0, float(y))]
        total += _expectation(gauss, pieces, 0, [])
    return float(total)
