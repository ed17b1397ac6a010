"""Exact intersection calculus on X = C x S, arithmetic diagonals and their heights."""

from .classes import FactorClass, GradingError
from .context import ContextError, GeometryContext, NormalizationError
from .cycles import CycleExpr, PartialProductError

__version__ = "0.1.0"

__all__ = [
    "FactorClass", "GradingError", "ContextError", "GeometryContext", "NormalizationError",
    "CycleExpr", "PartialProductError", "__version__",
]
