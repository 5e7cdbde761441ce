from .models import (
    OriginMode,
    LawKind,
    BoundaryKind,
    SuiteName,
    METHOD_TAGS,
    ResultRow,
    RESULT_COLUMNS,
    RunManifest,
    EstimateRecord,
    FreeEnergyCurve,
)
from .errors import (
    WettingError,
    DomainError,
    SolverError,
    OracleRefused,
    InvariantViolation,
    CouplingViolation,
)

__all__ = [
    'OriginMode',
    'LawKind',
    'BoundaryKind',
    'SuiteName',
    'METHOD_TAGS',
    'ResultRow',
    'RESULT_COLUMNS',
    'RunManifest',
    'EstimateRecord',
    'FreeEnergyCurve',
    'WettingError',
    'DomainError',
    'SolverError',
    'OracleRefused',
    'InvariantViolation',
    'CouplingViolation',
]
