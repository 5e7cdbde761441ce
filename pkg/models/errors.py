# models/errors.py
"""Exception hierarchy shared by the numerical packages"""
from __future__ import annotations
from typing import List, Optional, Sequence, Tuple


class WettingError(Exception):
    """Base class for every failure raised by the laboratory"""
    pass


class DomainError(WettingError, ValueError):
    """A parameter lies outside the domain where the model is defined"""
    pass


class SolverError(WettingError):
    """Linear solve did not reach the required residual"""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class OracleRefused(WettingError):
    """The exact oracle was asked for a box it does not handle"""
    pass


class InvariantViolation(WettingError):
    """A structural invariant failed during a run"""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class CouplingViolation(InvariantViolation):
    """Monotone coupling produced lower > upper at some site"""

    def __init__(self, sites: Sequence[Tuple[int, ...]], max_excess: float):
        shown = list(sites)[:5]
        super().__init__(
            "coupling-order",
            f"lower chain exceeds upper chain at {len(sites)} site(s), e.g. {shown} (max excess {max_excess:.3e})",
        )
        self.sites: List[Tuple[int, ...]] = list(sites)
        self.max_excess = max_excess
