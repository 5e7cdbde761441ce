# sampler/gibbs.py
"""
Heat-bath dynamics for the pinned, walled field.

The single-site conditional law is a Gaussian N(m, 1/2d) reweighted on the three
intervals (-inf, 0), [0, a], (a, inf). Sampling goes through the exact inverse
CDF of that mixture, which is nondecreasing both in the uniform and in m; this
is what makes the coupled dynamics in sampler.coupling monotone.
"""
from __future__ import annotations
import logging
from typing import Iterator, NamedTuple, Optional

import numpy as np
from scipy.special import log_ndtr, logsumexp

from field.gaussian import FieldConfig, GaussianSolve
from field.lattice import BoxLattice
from field.model import ModelParams, disorder_values, resolve_boundary, site_rewards
from models.errors import DomainError
from utils.normal import log_mass, truncated_ppf

log = logging.getLogger("Wetting.sampler")

DEFAULT_BURN_IN = 200
DEFAULT_THINNING = 5
_Q_EPS = 1e-15


class SiteConditional(NamedTuple):
    """Conditional law of a batch of sites given their neighbours"""
    mean: np.ndarray
    sd: float
    window: float
    log_weights: np.ndarray  # shape (n, 3): below wall, contact window, above window

    @property
    def probabilities(self) -> np.ndarray:
        lse = logsumexp(self.log_weights, axis=1, keepdims=True)
        with np.errstate(invalid="ignore"):
            return np.exp(self.log_weights - lse)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Exact inverse CDF of the three-interval mixture at the uniforms u"""
        u = np.asarray(u, dtype=float)
        m = self.mean
        s = self.sd
        n = m.size
        lse = logsumexp(self.log_weights, axis=1)
        degenerate = ~np.isfinite(lse)
        out = np.empty(n)
        if degenerate.any():
            # every interval weight underflowed: place at the nearest admissible point
            log.warning(f"conditional weights underflowed at {int(degenerate.sum())} site(s); using deterministic placement")
            out[degenerate] = np.clip(m[degenerate], 0.0, self.window)
        ok = ~degenerate
        if not ok.any():
            return out
        p = np.exp(self.log_weights[ok] - lse[ok, None])
        cum = np.cumsum(p, axis=1)
        uu = u[ok]
        comp = (uu[:, None] >= cum[:, :2]).sum(axis=1)
        rows = np.arange(comp.size)
        below = np.where(comp == 0, 0.0, cum[rows, np.maximum(comp - 1, 0)])
        pc = p[rows, comp]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(pc > 0, (uu - below) / pc, 0.5)
        q = np.clip(q, _Q_EPS, 1.0 - _Q_EPS)
        mo = m[ok]
        z0 = -mo / s
        z1 = (self.window - mo) / s
        lo = np.select([comp == 0, comp == 1], [np.full_like(z0, -np.inf), z0], z1)
        hi = np.select([comp == 0, comp == 1], [z0, z1], np.full_like(z1, np.inf))
        values = mo + s * truncated_ppf(q, lo, hi)
        # rounding in m + s z can leave the interval by an ulp
        values = np.select(
            [comp == 0, comp == 1],
            [np.minimum(values, 0.0), np.clip(values, 0.0, self.window)],
            np.maximum(values, self.window),
        )
        out[ok] = values
        return out


def site_conditional(
    params: ModelParams,
    neighbor_sum: np.ndarray,
    rewards: np.ndarray,
    coupling: float = 1.0,
) -> SiteConditional:
    """
    Mixture weights for sites with the given neighbour sums and rewards Y.

    `coupling` scales both the pinning reward and the wall penalty (t = 1 is the
    model itself, t = 0 the free field; a hard wall stays hard).
    """
    d = params.d
    m = np.asarray(neighbor_sum, dtype=float) / (2.0 * d)
    s = 1.0 / np.sqrt(2.0 * d)
    a = params.window
    z0 = -m / s
    z1 = (a - m) / s
    if params.hard_wall:
        lw_below = np.full_like(m, -np.inf)
    else:
        lw_below = -coupling * params.K + log_ndtr(z0)
    lw_contact = coupling * params.reward * np.asarray(rewards, dtype=float) + log_mass(z0, z1)
    lw_above = log_ndtr(-z1)
    return SiteConditional(m, s, a, np.stack([lw_below, lw_contact, lw_above], axis=1))


class GibbsChain:
    """
    Heat-bath chain on one box.

    A sweep updates colour 0 then colour 1 of the checkerboard (lexicographic order
    inside a colour). Sites of one colour have no neighbours of the same colour, so
    a colour update equals the sequential single-site updates.
    """

    def __init__(
        self,
        params: ModelParams,
        rng: np.random.Generator,
        boundary_values: Optional[np.ndarray] = None,
        omega: Optional[np.ndarray] = None,
        init: Optional[np.ndarray] = None,
        coupling: float = 1.0,
    ):
        if not 0.0 <= coupling <= 1.0:
            raise DomainError(f"coupling must lie in [0, 1], got {coupling}")
        self.params = params
        self.lattice: BoxLattice = params.lattice
        self.rng = rng
        self.coupling = coupling
        if boundary_values is None:
            boundary_values = resolve_boundary(params, rng)
        if omega is None:
            omega = disorder_values(params)
        self.omega = np.asarray(omega, dtype=float)
        self.rewards = site_rewards(params, self.omega)
        self._interior_rewards = self.rewards[self.lattice.interior_slice]
        self.values = np.array(boundary_values, dtype=float)
        if init is None:
            self.values[self.lattice.interior_slice] = self._default_interior()
        else:
            init = np.asarray(init, dtype=float)
            if init.shape == self.lattice.shape:
                init = init[self.lattice.interior_slice]
            self.values[self.lattice.interior_slice] = init.reshape(self.lattice.interior_shape)
        parity = self.lattice.parity[self.lattice.interior_slice]
        self._color_masks = (parity == 0, parity == 1)
        self.sweeps = 0

    def _default_interior(self) -> np.ndarray:
        if self.lattice.n_interior <= 1 or self.lattice.n_interior > 50_000:
            interior = np.full(self.lattice.interior_shape, max(float(np.mean(self.values[self.lattice.boundary_mask])), 0.0))
        else:
            mean = GaussianSolve(self.lattice).mean(self.values).reshape(self.lattice.interior_shape)
            interior = mean
        if self.params.hard_wall:
            interior = np.maximum(interior, 0.0)
        return interior

    @property
    def config(self) -> FieldConfig:
        return FieldConfig(self.lattice, self.values.copy())

    @property
    def interior(self) -> np.ndarray:
        return self.values[self.lattice.interior_slice]

    def color_mask(self, color: int) -> np.ndarray:
        return self._color_masks[color]

    def update_color(self, color: int, uniforms: np.ndarray) -> None:
        """Heat-bath update of every site of one colour from interior-shaped uniforms"""
        mask = self.color_mask(color)
        if not mask.any():
            return
        nsum = self.lattice.neighbor_sum(self.values)
        cond = site_conditional(self.params, nsum[mask], self._interior_rewards[mask], self.coupling)
        self.values[self.lattice.interior_slice][mask] = cond.quantile(uniforms[mask])

    def sweep(self) -> None:
        for color in (0, 1):
            self.update_color(color, self.rng.random(self.lattice.interior_shape))
        self.sweeps += 1

    def run(self, n_sweeps: int) -> None:
        for _ in range(n_sweeps):
            self.sweep()

    def samples(self, n_samples: int, burn_in: int = DEFAULT_BURN_IN, thinning: int = DEFAULT_THINNING) -> Iterator[np.ndarray]:
        """Yield views of the field after burn-in, every `thinning` sweeps"""
        self.run(burn_in)
        for _ in range(n_samples):
            self.run(thinning)
            yield self.values


def sweep(chain: GibbsChain) -> GibbsChain:
    chain.sweep()
    return chain
