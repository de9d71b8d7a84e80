"""Exact stratification of loop and inertia spaces of linear group actions."""

from ._kernels import BACKEND
from .groups import CircleWeightAction, FiniteMatrixGroup, close_generators
from .strata import inertia_strata, loop_strata

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CircleWeightAction",
    "FiniteMatrixGroup",
    "close_generators",
    "inertia_strata",
    "loop_strata",
]
