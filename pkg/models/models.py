# models/models.py
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, TypedDict

import numpy as np

# Enumerations used across packages
OriginMode = Literal["corner", "centered"]
LawKind = Literal["standard_gaussian", "symmetric_bernoulli", "shifted_exponential"]
BoundaryKind = Literal["constant", "sampled"]

SuiteName = Literal[
    "oracle", "coupling", "ti-curve", "scaling",
    "kgap", "superadd", "marginal", "second-moment",
]

# Method tags written to the `method` column of results.csv
METHOD_TAGS: Dict[str, str] = {
    "exact": "closed form or adaptive quadrature of the single/few-site oracle",
    "oracle-diff": "centred finite difference of the exact log Z in h, per interior site",
    "reduced-exact": "reduced partition function by quadrature on a few-site box",
    "quenched-exact": "quadrature of E log Z over the interior disorder of a single-site box",
    "annealed-exact": "log E Z computed exactly",
    "mcmc-contact": "heat-bath estimate of the interior contact density",
    "ti-h": "thermodynamic integration of the contact density in h",
    "ti-coupling": "thermodynamic integration in the coupling parameter from Z = 1",
    "jensen-max": "Jensen lower bound maximised over the boundary height",
    "jensen-explicit": "closed-form Jensen lower bound at the explicit height",
    "onesite": "one-site gain, exact vs asymptotic",
    "ratio": "P(phi <= 1) / P(phi < 0) normalised by its asymptote",
    "kgap-quadrature": "E log(1 + exp(-K + (Y)_-)) by quadrature",
    "kgap-quenched": "log Z_K - log Z_inf against the per-site reflection bound",
    "kgap-rate": "fitted decay rate c of the K-gap, value ~ exp(-c K)",
    "superadd": "(1/|window|) E E^u log Z with sampled boundaries",
    "coupling": "monotone coupled pair order check",
    "marginal": "empirical CDF of one site across box sizes",
    "reduced-q": "reduced partition function by importance sampling",
    "variance-bound": "Var Q against e^{2h} Var(xi) sum P(delta=1)^2",
    "sigma": "centre variance extrapolation of the Dirichlet Green function",
    "sigma-walk": "centre variance from killed random walk visit counts",
    "simulated": "superadditive estimate at the Jensen height, as -log f / log(1/h)^2",
    "conjecture": "delta-pinning conjecture value (not a theorem)",
}


class ResultRow(TypedDict):
    """One line of results.csv"""
    experiment: str
    d: int
    N: int
    beta: float
    h: float
    K: float
    law: str
    seed: int
    method: str
    value: float
    std_error: float
    n_samples: int
    replicas: int
    wall_seconds: float


RESULT_COLUMNS: List[str] = list(ResultRow.__annotations__)


class RunManifest(TypedDict):
    version: str
    config_path: str
    suite: str
    seed: int
    resolved: Dict[str, Dict[str, Any]]
    rows: int


@dataclass(frozen=True)
class EstimateRecord:
    """A Monte Carlo or exact estimate together with its provenance"""
    value: float
    std_error: float
    n_samples: int
    n_replicas: int
    params: Dict[str, Any]
    seed: int
    method: str

    def __post_init__(self):
        if not self.std_error >= 0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error}")
        if self.method not in METHOD_TAGS:
            raise ValueError(f"unknown method tag {self.method!r}")


@dataclass
class FreeEnergyCurve:
    h_grid: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    beta: float
    K: float
    d: int
    N: int
    densities: Optional[np.ndarray] = None
    density_errors: Optional[np.ndarray] = None
    flagged: List[int] = field(default_factory=list)

    @property
    def is_monotone(self) -> bool:
        return not self.flagged
