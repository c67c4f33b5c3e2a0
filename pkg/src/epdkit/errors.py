"""Exception hierarchy shared by all epdkit modules."""


class EPDError(Exception):
    """Base class for every error raised by epdkit."""


class DomainError(EPDError, ValueError):
    """Argument outside the mathematical domain (pole, non-integrable weight)."""


class UsageError(EPDError, ValueError):
    """Inconsistent call: wrong regime, mismatched rule, dimension mismatch."""


class PreconditionError(EPDError, ValueError):
    """The initial datum does not satisfy the class a solver requires."""


class NumericalError(EPDError, ArithmeticError):
    """An iterative procedure failed to converge."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EvaluationError(EPDError, ArithmeticError):
    """An integrand returned a non-finite value at a quadrature node."""

    def __init__(self, message, node_index=None):
        super().__init__(message)
        self.node_index = node_index


class ConfigError(EPDError, ValueError):
    """Invalid scenario configuration; ``field`` is the dotted key path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class TruncationWarning(UserWarning):
    """A datum has not decayed at the truncation radius of a spectral grid."""
