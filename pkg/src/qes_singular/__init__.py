"""Quasi-exact solutions of V(q) = a q^2 + b q^-4 + c q^-6 in D dimensions."""

from .errors import (
    BracketFailure,
    DegenerateParametersError,
    DomainError,
    GridFailure,
    NotMappableError,
    QesError,
    ResolutionError,
)
from .model import (
    AnsatzExponents,
    Channel,
    PotentialParams,
    PrefactorPoly,
    QesSolution,
    SolverConfig,
    WavefunctionSample,
    effective_L,
)
from .scan import ScanRequest, ScanResult, enumerate_table, scan_b

__all__ = [
    "AnsatzExponents",
    "BracketFailure",
    "Channel",
    "DegenerateParametersError",
    "DomainError",
    "GridFailure",
    "NotMappableError",
    "PotentialParams",
    "PrefactorPoly",
    "QesError",
    "QesSolution",
    "ResolutionError",
    "ScanRequest",
    "ScanResult",
    "SolverConfig",
    "WavefunctionSample",
    "effective_L",
    "enumerate_table",
    "scan_b",
]
