"""Periodic gravity water waves by a regularized mountain-pass method."""
from .discretization import Field, GridSpec, MollifierSpec
from .model import Parameters

__version__ = "0.1.0"
__all__ = ["Field", "GridSpec", "MollifierSpec", "Parameters"]
