"""Exception hierarchy shared across the package.

Two families matter to callers: ConfigError (malformed user input, CLI exit
code 2) and NumericalError (violated numerical precondition, CLI exit code 3).
"""


class Homog1dError(Exception):
    """Base class for all package errors."""


class ConfigError(Homog1dError):
    """Malformed configuration or JSON input."""


class NumericalError(Homog1dError):
    """A numerical precondition does not hold."""


class NonPositiveBoundError(NumericalError):
    """Certified lower bound of a coefficient profile is not positive."""

    def __init__(self, bound: float, message: str | None = None):
        self.bound = bound
        super().__init__(message or f"certified lower bound {bound:.6g} is not positive")


class NonDifferentiableProfileError(NumericalError):
    """Pointwise derivative requested from a piecewise-constant profile."""


class EpsilonError(NumericalError):
    """eps is not admissible (1/eps must be a positive integer unless relaxed)."""


class TimestepError(NumericalError):
    """Euler-Maruyama step dt exceeds the eps**2/10 stability budget."""


class DomainError(NumericalError):
    """Point or interval leaves the domain the operation is defined on."""


class DegenerateFitError(NumericalError):
    """Too few usable points for a least-squares rate fit."""


class HypothesisViolationError(NumericalError):
    """Pointwise comparison inequality fails somewhere on the grid."""

    def __init__(self, x: float, gap: float):
        self.x = x
        self.gap = gap
        super().__init__(f"inequality fails at x={x:.6g} by {gap:.3e}")
