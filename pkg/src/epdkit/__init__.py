"""Solvers for the singular Euler-Poisson-Darboux equation with Bessel operators."""
from ._backend import BACKEND
from .errors import (ConfigError, DomainError, EPDError, EvaluationError,
                     NumericalError, PreconditionError, UsageError)

__version__ = "0.1.0"
__all__ = ["BACKEND", "ConfigError", "DomainError", "EPDError", "EvaluationError",
           "NumericalError", "PreconditionError", "UsageError", "__version__"]
