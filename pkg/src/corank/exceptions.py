"""Exception hierarchy shared across the package."""


class CorankError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CorankError, ValueError):
    """Input data violates a precondition (shape, finiteness, sizes)."""


class ConfigurationError(CorankError, ValueError):
    """An option or option combination is not supported."""


class NumericalError(CorankError, ArithmeticError):
    """A numerical routine failed (singular matrix, divergent integral)."""


class DegenerateSplitError(NumericalError):
    """The random sign split left one of the two sub-samples empty."""


class ScenarioError(CorankError, RuntimeError):
    """A simulation scenario could not be completed."""
