# field/lattice.py
"""
Finite boxes of Z^d.

Field values live in numpy arrays shaped (side,)*d; the array index of a site is
its coordinate minus `lo` on every axis.
"""
from __future__ import annotations
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, NamedTuple, Tuple

import numpy as np
import scipy.sparse as sp

from models.errors import DomainError
from models.models import OriginMode

Site = Tuple[int, ...]


class SiteIndex(NamedTuple):
    coords: Site
    flat_id: int


@dataclass(frozen=True)
class BoxLattice:
    d: int
    N: int
    origin_mode: OriginMode = "corner"

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if self.N < 2:
            raise DomainError(f"box size N must be >= 2, got {self.N}")
        if self.origin_mode not in ("corner", "centered"):
            raise DomainError(f"origin_mode must be 'corner' or 'centered', got {self.origin_mode!r}")

    # --- geometry ---
    @property
    def lo(self) -> int:
        return 0 if self.origin_mode == "corner" else -self.N

    @property
    def hi(self) -> int:
        return self.N

    @property
    def side(self) -> int:
        return self.hi - self.lo + 1

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.side,) * self.d

    @property
    def interior_shape(self) -> Tuple[int, ...]:
        return (self.side - 2,) * self.d

    @property
    def interior_slice(self) -> Tuple[slice, ...]:
        return (slice(1, -1),) * self.d

    @property
    def n_sites(self) -> int:
        return self.side ** self.d

    @property
    def n_interior(self) -> int:
        return (self.side - 2) ** self.d

    @property
    def n_boundary(self) -> int:
        return self.n_sites - self.n_interior

    @property
    def n_energy(self) -> int:
        return (self.side - 1) ** self.d

    def contains(self, site: Site) -> bool:
        return len(site) == self.d and all(self.lo <= c <= self.hi for c in site)

    def is_interior(self, site: Site) -> bool:
        return len(site) == self.d and all(self.lo < c < self.hi for c in site)

    def array_index(self, site: Site) -> Tuple[int, ...]:
        if not self.contains(site):
            raise DomainError(f"site {site} is outside {self}")
        return tuple(c - self.lo for c in site)

    # --- masks over the full box ---
    @cached_property
    def coordinates(self) -> np.ndarray:
        """Array of shape (d,) + shape holding the coordinates of every site"""
        axis = np.arange(self.lo, self.hi + 1)
        return np.stack(np.meshgrid(*([axis] * self.d), indexing="ij"))

    @cached_property
    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.interior_slice] = True
        return mask

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        return ~self.interior_mask

    @cached_property
    def energy_mask(self) -> np.ndarray:
        """Λ̃: sites whose coordinates all lie in [lo + 1, hi]"""
        mask = np.zeros(self.shape, dtype=bool)
        mask[(slice(1, None),) * self.d] = True
        return mask

    @cached_property
    def parity(self) -> np.ndarray:
        """Checkerboard colour (sum of absolute coordinates mod 2)"""
        return (self.coordinates.sum(axis=0) % 2).astype(np.int8)

    # --- site enumeration ---
    def sites(self) -> Iterator[Site]:
        return itertools.product(range(self.lo, self.hi + 1), repeat=self.d)

    def interior_sites(self) -> Iterator[Site]:
        return itertools.product(range(self.lo + 1, self.hi), repeat=self.d)

    def boundary_sites(self) -> Iterator[Site]:
        return (s for s in self.sites() if not self.is_interior(s))

    def energy_sites(self) -> Iterator[Site]:
        return itertools.product(range(self.lo + 1, self.hi + 1), repeat=self.d)

    def site_index(self, site: Site) -> SiteIndex:
        if not self.is_interior(site):
            raise DomainError(f"site {site} is not interior to {self}")
        flat = np.ravel_multi_index(tuple(c - self.lo - 1 for c in site), self.interior_shape)
        return SiteIndex(tuple(site), int(flat))

    def site_from_index(self, flat_id: int) -> Site:
        if not 0 <= flat_id < self.n_interior:
            raise DomainError(f"flat id {flat_id} out of range [0, {self.n_interior})")
        idx = np.unravel_index(flat_id, self.interior_shape)
        return tuple(int(i) + self.lo + 1 for i in idx)

    def center(self) -> Site:
        mid = (self.lo + self.hi) // 2
        return (mid,) * self.d

    # --- edges and operators ---
    def energy_edges(self) -> List[Tuple[Site, Site]]:
        """Unordered nearest-neighbour pairs with at least one interior endpoint"""
        edges = []
        for x in self.sites():
            for k in range(self.d):
                y = x[:k] + (x[k] + 1,) + x[k + 1:]
                if self.contains(y) and (self.is_interior(x) or self.is_interior(y)):
                    edges.append((x, y))
        return edges

    def dirichlet_laplacian(self) -> sp.csr_matrix:
        """Precision matrix of the interior field: 2d on the diagonal, -1 per interior neighbour pair"""
        n = self.n_interior
        ids = np.arange(n).reshape(self.interior_shape)
        rows, cols = [], []
        for k in range(self.d):
            lower = [slice(None)] * self.d
            upper = [slice(None)] * self.d
            lower[k] = slice(0, -1)
            upper[k] = slice(1, None)
            a = ids[tuple(lower)].ravel()
            b = ids[tuple(upper)].ravel()
            rows.extend([a, b])
            cols.extend([b, a])
        r = np.concatenate(rows) if rows else np.array([], dtype=int)
        c = np.concatenate(cols) if cols else np.array([], dtype=int)
        off = sp.coo_matrix((-np.ones(r.size), (r, c)), shape=(n, n))
        return (off + sp.identity(n) * (2.0 * self.d)).tocsr()

    def incidence_matrix(self) -> sp.csr_matrix:
        """
        Edge-by-interior incidence D with D^T D equal to the Dirichlet Laplacian.

        Interior-boundary edges contribute a single +1 in their interior column.
        """
        n = self.n_interior
        ids = -np.ones(self.shape, dtype=np.int64)
        ids[self.interior_slice] = np.arange(n).reshape(self.interior_shape)
        rows, cols, vals = [], [], []
        edge = 0
        for k in range(self.d):
            lower = [slice(None)] * self.d
            upper = [slice(None)] * self.d
            lower[k] = slice(0, -1)
            upper[k] = slice(1, None)
            a = ids[tuple(lower)].ravel()
            b = ids[tuple(upper)].ravel()
            keep = (a >= 0) | (b >= 0)
            a, b = a[keep], b[keep]
            e = np.arange(edge, edge + a.size)
            edge += a.size
            ma, mb = a >= 0, b >= 0
            rows.extend([e[ma], e[mb]])
            cols.extend([a[ma], b[mb]])
            vals.extend([np.ones(ma.sum()), -np.ones(mb.sum())])
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(edge, n),
        )

    def neighbor_sum(self, values: np.ndarray) -> np.ndarray:
        """Sum of the 2d neighbours for every interior site, shaped like the interior"""
        total = np.zeros(self.interior_shape)
        for k in range(self.d):
            for shift in (-1, 1):
                sl = [slice(1, -1)] * self.d
                sl[k] = slice(1 + shift, self.side - 1 + shift)
                total += values[tuple(sl)]
        return total

    def boundary_drive(self, values: np.ndarray) -> np.ndarray:
        """Per interior site, the sum of its fixed boundary neighbours (flattened)"""
        only_boundary = np.where(self.boundary_mask, values, 0.0)
        return self.neighbor_sum(only_boundary).ravel()


def build_lattice(d: int, N: int, origin_mode: OriginMode = "corner") -> BoxLattice:
    return BoxLattice(d=d, N=N, origin_mode=origin_mode)


def neighbors(lattice: BoxLattice, site: Site) -> List[Site]:
    """Nearest neighbours of site that belong to the box"""
    if not lattice.contains(site):
        raise DomainError(f"site {site} is outside {lattice}")
    out = []
    for k in range(lattice.d):
        for shift in (-1, 1):
            y = site[:k] + (site[k] + shift,) + site[k + 1:]
            if lattice.contains(y):
                out.append(y)
    return out
