"""Moments, value distributions and level densities for SO(N) with forced eigenvalues at 1."""

from .errors import AccuracyWarning, ConvergenceWarning, DomainError, MixingWarning, PoleError
from .moments import EnsembleSpec

__all__ = [
    "EnsembleSpec",
    "DomainError",
    "PoleError",
    "ConvergenceWarning",
    "MixingWarning",
    "AccuracyWarning",
]
__version__ = "0.1.0"
