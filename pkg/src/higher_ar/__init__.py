"""Exact computations in higher Auslander-Reiten theory for quiver algebras."""

from .exact_linalg import Matrix
from .quiver_core import (
    AlgebraPresentation,
    compute_basis,
    format_algebra,
    load_algebra,
    parse_algebra,
)

__all__ = [
    "AlgebraPresentation",
    "Matrix",
    "compute_basis",
    "format_algebra",
    "load_algebra",
    "parse_algebra",
]
__version__ = "0.1.0"
