# field/model.py
"""
Parameters and weight of the pinned, walled, disordered field.
"""
from __future__ import annotations
import dataclasses
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, NamedTuple, Optional

import numpy as np

from models.errors import DomainError
from models.models import BoundaryKind, OriginMode
from .disorder import DisorderField, DisorderLaw
from .gaussian import FieldConfig, boundary_array, sample_boundary_at_height
from .lattice import BoxLattice


@dataclass(frozen=True)
class BoundarySpec:
    """Constant boundary at `height`, or free-field boundary sampled around `height`"""
    kind: BoundaryKind = "constant"
    height: float = 0.0
    pad: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("constant", "sampled"):
            raise DomainError(f"boundary kind must be 'constant' or 'sampled', got {self.kind!r}")
        if not math.isfinite(self.height):
            raise DomainError(f"boundary height must be finite, got {self.height}")


@dataclass(frozen=True)
class ModelParams:
    d: int
    N: int
    beta: float
    h: float
    K: float
    law: DisorderLaw
    seed: int
    origin_mode: OriginMode = "corner"
    boundary: BoundarySpec = field(default_factory=BoundarySpec)
    window: float = 1.0
    reward: float = 1.0

    def __post_init__(self):
        problems = []
        if not self.law.in_domain(self.beta):
            problems.append(f"beta={self.beta} outside the domain {self.law.interval} of {self.law.kind}")
        if not self.K >= 0:
            problems.append(f"K must lie in [0, inf], got {self.K}")
        if not math.isfinite(self.h):
            problems.append(f"h must be finite, got {self.h}")
        if not self.window > 0:
            problems.append(f"pinning window must be positive, got {self.window}")
        if not self.reward > 0:
            problems.append(f"pinning reward scale must be positive, got {self.reward}")
        if problems:
            raise DomainError("; ".join(problems))
        # lattice validation (d, N, origin_mode)
        BoxLattice(self.d, self.N, self.origin_mode)

    @property
    def hard_wall(self) -> bool:
        return math.isinf(self.K)

    @cached_property
    def lattice(self) -> BoxLattice:
        return BoxLattice(self.d, self.N, self.origin_mode)

    @property
    def lam(self) -> float:
        return self.law.lam(self.beta)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d, "N": self.N, "beta": self.beta, "h": self.h, "K": self.K,
            "law": self.law.kind, "seed": self.seed, "origin_mode": self.origin_mode,
            "boundary": self.boundary.kind, "u": self.boundary.height,
            "window": self.window, "reward": self.reward,
        }


class SiteIndicators(NamedTuple):
    delta: np.ndarray
    rho: np.ndarray
    rho_plus: np.ndarray


def site_indicators(values: np.ndarray, window: float = 1.0) -> SiteIndicators:
    """Contact 1[0, window], below-wall 1(<0) and at-most-one 1(<=1) indicators"""
    v = np.asarray(values, dtype=float)
    return SiteIndicators(
        delta=(v >= 0) & (v <= window),
        rho=v < 0,
        rho_plus=v <= 1.0,
    )


def generalized_indicator(a: float, b: float, phi):
    """b * 1[0, a](phi)"""
    if a <= 0:
        raise DomainError(f"window a must be positive, got {a}")
    phi = np.asarray(phi, dtype=float)
    return b * ((phi >= 0) & (phi <= a)).astype(float)


def disorder_values(params: ModelParams, seed: Optional[int] = None, lattice: Optional[BoxLattice] = None) -> np.ndarray:
    """omega over the box for the given seed; zeros when beta = 0 (omega never enters)"""
    lattice = lattice or params.lattice
    if params.beta == 0:
        return np.zeros(lattice.shape)
    return DisorderField(params.law, params.seed if seed is None else seed).on(lattice)


def site_rewards(params: ModelParams, omega: np.ndarray) -> np.ndarray:
    """Y_x = beta omega_x - lambda(beta) + h over the whole box"""
    return params.beta * np.asarray(omega, dtype=float) - params.lam + params.h


def _site_energy(params: ModelParams, values: np.ndarray, rewards: np.ndarray) -> np.ndarray:
    ind = site_indicators(values, params.window)
    energy = rewards * params.reward * ind.delta
    if params.hard_wall:
        return np.where(ind.rho, -np.inf, energy)
    return energy - params.K * ind.rho


def log_weight(params: ModelParams, config: FieldConfig, omega: Optional[np.ndarray] = None) -> float:
    """Sum over the energy window of Y b 1[0,a](phi) - K 1(phi < 0); -inf below a hard wall"""
    lattice = config.lattice
    if omega is None:
        omega = disorder_values(params, lattice=lattice)
    energy = _site_energy(params, config.values, site_rewards(params, omega))
    return float(np.sum(energy[lattice.energy_mask]))


def boundary_energy(params: ModelParams, boundary_values: np.ndarray, omega: np.ndarray) -> float:
    """Constant part of the log weight carried by the fixed sites of the energy window"""
    lattice = params.lattice
    energy = _site_energy(params, boundary_values, site_rewards(params, omega))
    return float(np.sum(energy[lattice.energy_mask & lattice.boundary_mask]))


def resolve_boundary(params: ModelParams, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Full-box array of boundary values for the configured boundary condition"""
    bc = params.boundary
    if bc.kind == "constant":
        return boundary_array(params.lattice, bc.height)
    if rng is None:
        raise DomainError("a sampled boundary needs a random generator")
    return boundary_array(params.lattice, sample_boundary_at_height(params.lattice, bc.height, rng, bc.pad))
