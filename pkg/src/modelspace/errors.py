"""Exception types shared across the toolkit.

Kept deliberately flat: callers catch ``ToolkitError`` for anything the
library raises on purpose, or one of the specific classes below.
"""


class ToolkitError(Exception):
    """Base class for all errors raised deliberately by this package."""


class DomainError(ToolkitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation was requested exactly at a pole."""


class ConstantInnerFunctionError(DomainError):
    """The inner function is a unimodular constant (tau = 0, no zeros)."""


class LevelSetNotFoundError(ToolkitError):
    """No part of the sublevel set was located inside the search box."""


class WindowTooSmallError(ToolkitError):
    """The covering constant c is too large for even one interval to fit."""


class DensityError(ToolkitError):
    """A relative-density precondition failed; carries the violating index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ContinuationError(ToolkitError):
    """A pole of the analytic continuation obstructs the requested region."""


class EmptyFamilyError(ToolkitError):
    """No admissible candidate survived the filtering step."""


class QuadratureError(ToolkitError):
    """Adaptive quadrature could not reach the requested tolerance.

    The best available estimate and its error bound are attached so a
    caller may still decide to use them.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class ConfigError(ToolkitError):
    """A scenario configuration file is malformed or out of range."""
