# field/disorder.py
"""
Disorder laws (mean 0, variance 1) and site-addressed disorder fields.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, NamedTuple, Sequence, Tuple

import numpy as np
from scipy import integrate, stats

from models.errors import DomainError
from models.models import LawKind
from utils.rng import philox_key, site_stream
from .lattice import BoxLattice, Site

log = logging.getLogger("Wetting.disorder")

LAW_KINDS: Tuple[str, ...] = ("standard_gaussian", "symmetric_bernoulli", "shifted_exponential")


@dataclass(frozen=True)
class DisorderLaw:
    kind: LawKind

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise DomainError(f"unknown disorder law {self.kind!r}; expected one of {', '.join(LAW_KINDS)}")

    @property
    def interval(self) -> Tuple[float, float]:
        """Open interval I_P where the log-moment generating function is finite"""
        if self.kind == "shifted_exponential":
            return (-np.inf, 1.0)
        return (-np.inf, np.inf)

    def in_domain(self, beta: float) -> bool:
        lo, hi = self.interval
        return lo < beta < hi

    def lam(self, beta: float) -> float:
        if not self.in_domain(beta):
            raise DomainError(f"beta={beta} outside the domain {self.interval} of the {self.kind} law")
        if self.kind == "standard_gaussian":
            return 0.5 * beta * beta
        if self.kind == "symmetric_bernoulli":
            return float(np.logaddexp(beta, -beta) - np.log(2.0))
        return float(-beta - np.log1p(-beta))

    def variance_xi(self, beta: float) -> float:
        """Var(exp(beta omega - lambda(beta))); infinite when 2 beta leaves the domain"""
        if not self.in_domain(2.0 * beta):
            return float("inf")
        return float(np.expm1(self.lam(2.0 * beta) - 2.0 * self.lam(beta)))

    def draw(self, gen: np.random.Generator) -> float:
        if self.kind == "standard_gaussian":
            return float(gen.standard_normal())
        if self.kind == "symmetric_bernoulli":
            return 1.0 if gen.random() < 0.5 else -1.0
        return float(gen.standard_exponential() - 1.0)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        if self.kind == "standard_gaussian":
            return rng.standard_normal(size)
        if self.kind == "symmetric_bernoulli":
            return np.where(rng.random(size) < 0.5, 1.0, -1.0)
        return rng.standard_exponential(size) - 1.0

    def expect(self, fn: Callable[[float], float], breakpoints: Sequence[float] = ()) -> float:
        """E[fn(omega)] by exact summation or adaptive quadrature split at breakpoints"""
        if self.kind == "symmetric_bernoulli":
            return 0.5 * (fn(1.0) + fn(-1.0))
        if self.kind == "standard_gaussian":
            lo, density = -np.inf, stats.norm.pdf
        else:
            lo, density = -1.0, (lambda w: np.exp(-(w + 1.0)))
        cuts = sorted(float(b) for b in breakpoints if np.isfinite(b) and b > lo)
        edges = [lo] + cuts + [np.inf]
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            value, _ = integrate.quad(lambda w: fn(w) * density(w), a, b, epsabs=1e-13, epsrel=1e-11, limit=200)
            total += value
        return total


def lam(law: DisorderLaw, beta: float) -> float:
    return law.lam(beta)


def xi(law: DisorderLaw, beta: float, omega):
    """Tilted disorder exp(beta omega - lambda(beta)); mean one"""
    return np.exp(beta * np.asarray(omega, dtype=float) - law.lam(beta))


def xi_truncated(law: DisorderLaw, beta: float, omega, H: float):
    if H <= 0:
        raise DomainError(f"truncation level must be positive, got {H}")
    return np.minimum(xi(law, beta, omega), H)


def h_shift_for_truncation(law: DisorderLaw, beta: float, H: float) -> float:
    """-log E[min(xi, H)]: the shift of h that compensates truncating the disorder at H"""
    if H <= 0:
        raise DomainError(f"truncation level must be positive, got {H}")
    if beta == 0:
        return 0.0
    lam_b = law.lam(beta)
    kink = (np.log(H) + lam_b) / beta
    mean = law.expect(lambda w: min(np.exp(beta * w - lam_b), H), breakpoints=(kink,))
    return float(-np.log(min(mean, 1.0)))


class TailProbe(NamedTuple):
    t_grid: np.ndarray
    tail: np.ndarray
    scaled: np.ndarray
    exponent: float


def tail_exponent_probe(
    law: DisorderLaw,
    beta: float,
    t_grid: Sequence[float],
    n_samples: int,
    rng: np.random.Generator,
    gamma: float = 1.0,
) -> TailProbe:
    """Empirical P(xi >= t), the product P(xi >= t) t^gamma and the log-log slope"""
    samples = xi(law, beta, law.sample(rng, n_samples))
    t = np.asarray(t_grid, dtype=float)
    tail = np.array([(samples >= ti).mean() for ti in t])
    keep = tail > 0
    exponent = float("nan")
    if keep.sum() >= 2:
        exponent = float(-np.polyfit(np.log(t[keep]), np.log(tail[keep]), 1)[0])
    return TailProbe(t, tail, tail * t ** gamma, exponent)


@dataclass(frozen=True)
class DisorderField:
    """
    Environment omega indexed by lattice sites.

    omega_x depends only on (seed, x): a Philox stream is keyed by the seed and
    addressed by the coordinates, so nested or shifted boxes see the same values
    on the sites they share.
    """
    law: DisorderLaw
    seed: int

    @cached_property
    def _key(self) -> np.ndarray:
        return philox_key(self.seed)

    def value_at(self, site: Site) -> float:
        return self.law.draw(site_stream(self._key, tuple(int(c) for c in site)))

    def on(self, lattice: BoxLattice) -> np.ndarray:
        """Disorder values over the whole box (read-only, cached)"""
        return _field_values(self, lattice)


@lru_cache(maxsize=64)
def _field_values(field: DisorderField, lattice: BoxLattice) -> np.ndarray:
    out = np.empty(lattice.shape)
    for site in lattice.sites():
        out[tuple(c - lattice.lo for c in site)] = field.value_at(site)
    out.setflags(write=False)
    log.debug(f"disorder field seed={field.seed} on {lattice}: {out.size} sites")
    return out
