"""Resolvents, proximal point runs and quantitative rate checks on CAT(0) model spaces."""

from .errors import (
    DomainError,
    InsufficientSchedule,
    InvalidInput,
    NumericFailure,
    ProxcatError,
    UnsupportedSet,
)
from .geometry import Euclidean, HalfPlane, Spider

__all__ = [
    "DomainError",
    "Euclidean",
    "HalfPlane",
    "InsufficientSchedule",
    "InvalidInput",
    "NumericFailure",
    "ProxcatError",
    "Spider",
    "UnsupportedSet",
]

__version__ = "0.1.0"
