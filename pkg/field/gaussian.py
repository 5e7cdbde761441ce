# field/gaussian.py
"""
Dirichlet Gaussian free field on a box: harmonic extension, exact samples,
Green function and the infinite-volume single-site variance.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse.linalg as spla

from models.errors import DomainError, SolverError
from utils.normal import gaussian_tail, gaussian_tail_asymptote
from .lattice import BoxLattice, Site

log = logging.getLogger("Wetting.field")

DIRECT_MAX_SITES = 20_000
RESIDUAL_TOL = 1e-10
DEFAULT_SIGMA_LEVELS: Tuple[int, ...] = (4, 8, 16, 32)

BoundaryValues = Union[float, np.ndarray]


@dataclass
class FieldConfig:
    """Field values over the whole box; boundary entries are fixed, interior entries free"""
    lattice: BoxLattice
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.lattice.shape:
            raise DomainError(f"field shape {self.values.shape} does not match lattice shape {self.lattice.shape}")

    @property
    def interior(self) -> np.ndarray:
        return self.values[self.lattice.interior_slice]

    def at(self, site: Site) -> float:
        return float(self.values[self.lattice.array_index(site)])

    def copy(self) -> "FieldConfig":
        return FieldConfig(self.lattice, self.values.copy())


def boundary_array(lattice: BoxLattice, boundary_values: BoundaryValues) -> np.ndarray:
    """Full-box array carrying the boundary values (interior entries are zero)"""
    if np.isscalar(boundary_values):
        out = np.full(lattice.shape, float(boundary_values))
    else:
        out = np.array(boundary_values, dtype=float)
        if out.shape != lattice.shape:
            raise DomainError(f"boundary array shape {out.shape} does not match lattice shape {lattice.shape}")
    out[lattice.interior_slice] = 0.0
    return out


class GaussianSolve:
    """
    Linear algebra of the interior precision matrix Q (the Dirichlet Laplacian).

    SuperLU factorisation up to `direct_max_sites` interior sites, conjugate
    gradients beyond. Every solve is checked against RESIDUAL_TOL.
    """

    def __init__(self, lattice: BoxLattice, direct_max_sites: int = DIRECT_MAX_SITES):
        self.lattice = lattice
        self.precision = lattice.dirichlet_laplacian().tocsc()
        self.method = "direct" if lattice.n_interior <= direct_max_sites else "iterative"
        self._factor = spla.splu(self.precision) if self.method == "direct" else None
        log.debug(f"GaussianSolve {lattice}: {lattice.n_interior} sites, method={self.method}")

    @cached_property
    def incidence(self):
        return self.lattice.incidence_matrix()

    def _solve_vector(self, rhs: np.ndarray) -> np.ndarray:
        if self._factor is not None:
            return self._factor.solve(rhs)
        x, info = spla.cg(self.precision, rhs, rtol=1e-12, atol=0.0, maxiter=20 * self.lattice.n_interior)
        if info != 0:
            raise SolverError(f"conjugate gradients did not converge (info={info})")
        return x

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.ndim == 1:
            x = self._solve_vector(rhs)
        elif self._factor is not None:
            x = self._factor.solve(rhs)
        else:
            x = np.column_stack([self._solve_vector(rhs[:, j]) for j in range(rhs.shape[1])])
        residual = np.linalg.norm(self.precision @ x - rhs) / max(np.linalg.norm(rhs), 1e-300)
        if residual > RESIDUAL_TOL:
            raise SolverError(f"relative residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}", residual=residual)
        return x

    def covariance_column(self, flat_id: int) -> np.ndarray:
        e = np.zeros(self.lattice.n_interior)
        e[flat_id] = 1.0
        return self.solve(e)

    @cached_property
    def diag_variances(self) -> np.ndarray:
        n = self.lattice.n_interior
        out = np.empty(n)
        chunk = 256
        for start in range(0, n, chunk):
            stop = min(start + chunk, n)
            rhs = np.zeros((n, stop - start))
            rhs[np.arange(start, stop), np.arange(stop - start)] = 1.0
            cols = self.solve(rhs)
            out[start:stop] = cols[np.arange(start, stop), np.arange(stop - start)]
        return out

    def mean(self, boundary_values: BoundaryValues) -> np.ndarray:
        """Interior mean (harmonic extension), flattened"""
        return self.solve(self.lattice.boundary_drive(boundary_array(self.lattice, boundary_values)))

    def fluctuations(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        """Centred samples Q^{-1} D^T z; covariance is exactly Q^{-1}"""
        n_edges = self.incidence.shape[0]
        if size is None:
            z = rng.standard_normal(n_edges)
        else:
            z = rng.standard_normal((n_edges, size))
        return self.solve(self.incidence.T @ z)


def _assemble(lattice: BoxLattice, boundary_values: BoundaryValues, interior_flat: np.ndarray) -> FieldConfig:
    values = boundary_array(lattice, boundary_values)
    values[lattice.interior_slice] = interior_flat.reshape(lattice.interior_shape)
    return FieldConfig(lattice, values)


def harmonic_extension(
    lattice: BoxLattice,
    boundary_values: BoundaryValues,
    solver: Optional[GaussianSolve] = None,
) -> FieldConfig:
    solver = solver or GaussianSolve(lattice)
    return _assemble(lattice, boundary_values, solver.mean(boundary_values))


def sample_free_field(
    lattice: BoxLattice,
    boundary_values: BoundaryValues,
    rng: np.random.Generator,
    solver: Optional[GaussianSolve] = None,
) -> FieldConfig:
    """One exact draw of the Dirichlet free field with the given boundary condition"""
    solver = solver or GaussianSolve(lattice)
    interior = solver.mean(boundary_values) + solver.fluctuations(rng)
    return _assemble(lattice, boundary_values, interior)


def green_function(lattice: BoxLattice, x: Site, y: Site, solver: Optional[GaussianSolve] = None) -> float:
    """Covariance of the free field at interior sites x and y"""
    for site in (x, y):
        if not lattice.is_interior(site):
            raise DomainError(f"Green function is defined on interior sites only, got {site}")
    solver = solver or GaussianSolve(lattice)
    column = solver.covariance_column(lattice.site_index(y).flat_id)
    return float(column[lattice.site_index(x).flat_id])


def sample_boundary_at_height(
    lattice: BoxLattice,
    u: float,
    rng: np.random.Generator,
    pad: Optional[int] = None,
) -> np.ndarray:
    """
    Boundary values distributed as the free field around height u.

    The field is drawn on the box enlarged by `pad` sites on every side (with
    constant boundary u) and restricted to the boundary of `lattice`. Interior
    entries of the returned array are set to u and carry no meaning.
    """
    pad = lattice.N if pad is None else int(pad)
    if pad < 1:
        raise DomainError(f"pad must be >= 1, got {pad}")
    if lattice.origin_mode == "corner":
        big = BoxLattice(lattice.d, lattice.N + 2 * pad, "corner")
    else:
        big = BoxLattice(lattice.d, lattice.N + pad, "centered")
    sample = sample_free_field(big, u, rng)
    block = sample.values[(slice(pad, pad + lattice.side),) * lattice.d].copy()
    block[lattice.interior_slice] = u
    return block


# --- single-site variance in infinite volume ---

def center_variance(d: int, L: int) -> float:
    """Variance at the centre of the corner box of side L (c_L)"""
    lattice = BoxLattice(d, L, "corner")
    return green_function(lattice, lattice.center(), lattice.center())


class SigmaEstimate(NamedTuple):
    d: int
    value: float
    error: float
    levels: Tuple[int, ...]
    center_variances: Tuple[float, ...]
    extrapolants: Tuple[float, ...]

    @property
    def walk_normalized(self) -> float:
        """Green function normalised by visits of the simple random walk (2d times the variance)"""
        return walk_green_normalization(self.d, self.value)


def richardson(levels: Sequence[int], values: Sequence[float], d: int) -> Tuple[float, ...]:
    """Pairwise extrapolants removing a correction proportional to L^{-(d-2)}"""
    p = d - 2
    out = []
    for k in range(1, len(levels)):
        ratio = (levels[k] / levels[k - 1]) ** p
        out.append((ratio * values[k] - values[k - 1]) / (ratio - 1.0))
    return tuple(out)


@lru_cache(maxsize=16)
def sigma_d_sq(d: int, levels: Tuple[int, ...] = DEFAULT_SIGMA_LEVELS) -> SigmaEstimate:
    """
    Infinite-volume single-site variance of the free field in d >= 3.

    The error is the difference between the last two extrapolants (or between the
    two largest boxes when only two levels are given).
    """
    if d < 3:
        raise DomainError(f"the infinite-volume variance is finite only for d >= 3, got d={d}")
    levels = tuple(sorted(int(L) for L in levels))
    if len(levels) < 2 or levels[0] < 2:
        raise DomainError(f"need at least two box sides >= 2, got {levels}")
    values = tuple(center_variance(d, L) for L in levels)
    extrap = richardson(levels, values, d)
    if len(extrap) >= 2:
        error = abs(extrap[-1] - extrap[-2])
    else:
        error = abs(values[-1] - values[-2])
    log.info(f"sigma_{d}^2 = {extrap[-1]:.6f} +/- {error:.2e} from levels {levels}")
    return SigmaEstimate(d, extrap[-1], error, levels, values, extrap)


def walk_green_normalization(d: int, sigma_sq: float) -> float:
    """2d sigma^2: the random-walk Green function G(0, 0)"""
    return 2.0 * d * sigma_sq


def killed_walk_green(
    lattice: BoxLattice,
    x: Site,
    y: Site,
    n_walks: int,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """
    Monte Carlo Green function: visits to y of a simple random walk started at x
    and killed on the boundary, divided by 2d. Returns (estimate, standard error).
    """
    if not (lattice.is_interior(x) and lattice.is_interior(y)):
        raise DomainError("killed walk needs interior endpoints")
    d = lattice.d
    target = np.array(y)
    pos = np.tile(np.array(x), (n_walks, 1))
    walker = np.arange(n_walks)
    visits = np.zeros(n_walks)
    visits += np.all(pos == target, axis=1)
    while walker.size:
        axis = rng.integers(0, d, size=walker.size)
        step = rng.choice((-1, 1), size=walker.size)
        pos[np.arange(walker.size), axis] += step
        alive = np.all((pos > lattice.lo) & (pos < lattice.hi), axis=1)
        pos = pos[alive]
        walker = walker[alive]
        visits[walker] += np.all(pos == target, axis=1)
    scale = 2.0 * d
    return float(visits.mean() / scale), float(visits.std(ddof=1) / np.sqrt(n_walks) / scale)


def sigma_d_sq_walk(
    d: int,
    levels: Tuple[int, int],
    n_walks: int,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """Independent estimate of sigma_d^2 from killed walks at two box sides"""
    if d < 3:
        raise DomainError(f"d must be >= 3, got {d}")
    small, large = levels
    estimates = []
    for L in (small, large):
        lattice = BoxLattice(d, L, "corner")
        estimates.append(killed_walk_green(lattice, lattice.center(), lattice.center(), n_walks, rng))
    ratio = (large / small) ** (d - 2)
    value = (ratio * estimates[1][0] - estimates[0][0]) / (ratio - 1.0)
    error = np.hypot(ratio * estimates[1][1], estimates[0][1]) / (ratio - 1.0)
    return float(value), float(error)


__all__ = [
    "FieldConfig", "GaussianSolve", "SigmaEstimate", "boundary_array",
    "harmonic_extension", "sample_free_field", "green_function", "sample_boundary_at_height",
    "center_variance", "sigma_d_sq", "sigma_d_sq_walk", "killed_walk_green",
    "walk_green_normalization", "richardson", "gaussian_tail", "gaussian_tail_asymptote",
]
