# sampler/coupling.py
"""
Monotone coupling of heat-bath chains.

All chains read one uniform per site and colour, addressed by absolute
coordinates, so a site shared by two boxes gets the same uniform in both.
"""
from __future__ import annotations
import logging
from typing import List, Sequence, Tuple

import numpy as np

from field.lattice import BoxLattice
from models.errors import CouplingViolation, DomainError
from .gibbs import GibbsChain

log = logging.getLogger("Wetting.coupling")

ORDER_TOLERANCE = 1e-9


def _block(outer: BoxLattice, inner: BoxLattice) -> Tuple[slice, ...]:
    """Slice of outer's full-box array covering inner's box"""
    start = inner.lo - outer.lo
    return (slice(start, start + inner.side),) * outer.d


def _contained(outer: BoxLattice, inner: BoxLattice) -> bool:
    return outer.d == inner.d and outer.lo <= inner.lo and inner.hi <= outer.hi


class CoupledLadder:
    """
    Chains ordered from top to bottom: chains[0] >= chains[1] >= ... on shared sites.

    Either every chain lives on the same box (ordered boundaries, any wall), or the
    boxes are nested with chains[0] the largest; nested boxes need the hard wall so
    that the upper chain stays above the smaller box's fixed boundary.
    """

    def __init__(self, chains: Sequence[GibbsChain], rng: np.random.Generator):
        if len(chains) < 2:
            raise DomainError("a coupling needs at least two chains")
        self.chains: List[GibbsChain] = list(chains)
        self.rng = rng
        top = self.chains[0].lattice
        for upper, lower in zip(self.chains[:-1], self.chains[1:]):
            if not _contained(upper.lattice, lower.lattice) or not _contained(top, lower.lattice):
                raise DomainError(f"{lower.lattice} is not contained in {upper.lattice}")
            if upper.lattice != lower.lattice and not (upper.params.hard_wall and lower.params.hard_wall):
                raise DomainError("nested boxes can only be coupled monotonically under the hard wall")
        self._interior_blocks = []
        for chain in self.chains:
            start = chain.lattice.lo - top.lo
            self._interior_blocks.append((slice(start, start + chain.lattice.side - 2),) * top.d)
        try:
            self.check_order()
        except CouplingViolation as e:
            raise DomainError(f"initial configurations are not ordered: {e}") from e
        self.sweeps = 0

    def check_order(self) -> None:
        for upper, lower in zip(self.chains[:-1], self.chains[1:]):
            above = upper.values[_block(upper.lattice, lower.lattice)]
            excess = lower.values - above
            bad = excess > ORDER_TOLERANCE
            if bad.any():
                coords = lower.lattice.coordinates
                sites = [tuple(int(c) for c in coords[(slice(None),) + tuple(idx)]) for idx in np.argwhere(bad)]
                log.error(f"coupling order violated at {len(sites)} site(s)")
                raise CouplingViolation(sites, float(excess.max()))

    def sweep(self) -> None:
        top = self.chains[0].lattice
        for color in (0, 1):
            uniforms = self.rng.random(top.interior_shape)
            for chain, block in zip(self.chains, self._interior_blocks):
                chain.update_color(color, uniforms[block])
            self.check_order()
        self.sweeps += 1
        for chain in self.chains:
            chain.sweeps += 1

    def run(self, n_sweeps: int) -> None:
        for _ in range(n_sweeps):
            self.sweep()


class CoupledPair(CoupledLadder):
    """Two coupled chains; `upper` dominates `lower`"""

    def __init__(self, upper: GibbsChain, lower: GibbsChain, rng: np.random.Generator):
        super().__init__([upper, lower], rng)

    @property
    def upper(self) -> GibbsChain:
        return self.chains[0]

    @property
    def lower(self) -> GibbsChain:
        return self.chains[1]


def coupled_sweep(pair: CoupledLadder) -> CoupledLadder:
    pair.sweep()
    return pair
