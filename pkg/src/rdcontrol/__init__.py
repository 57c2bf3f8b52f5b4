"""Barriers, spectral certificates and constrained boundary control for
bistable reaction-diffusion equations with gene-flow drift."""

__version__ = "0.1.0"

from .errors import InvalidInput, RDControlError, SolverFailure
from .model import BistableNonlinearity, DomainGeometry, DriftField, GridProfile

__all__ = [
    "__version__",
    "RDControlError",
    "InvalidInput",
    "SolverFailure",
    "BistableNonlinearity",
    "DriftField",
    "DomainGeometry",
    "GridProfile",
]
