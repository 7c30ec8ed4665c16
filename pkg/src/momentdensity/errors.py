"""Exception hierarchy shared by every module of the package."""


class MomentDensityError(Exception):
    """Base class for all package errors."""


class DomainError(MomentDensityError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(MomentDensityError, ValueError):
    """An invalid name, rule, or combination of options was requested."""


class StateError(MomentDensityError, RuntimeError):
    """A required quantity (for example the total weight) is not available."""


class NumericError(MomentDensityError, ArithmeticError):
    """A numerical routine failed to reach its tolerance."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DegenerateCurvatureError(DomainError):
    """A local smoothing rule was asked for a point where its derivative vanishes."""
