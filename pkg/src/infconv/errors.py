"""Exception hierarchy.

Usage errors (bad input, violated hypotheses, malformed configs) are kept
apart from invariant violations so the CLI can map them to distinct exit codes.
"""


class InfconvError(Exception):
    """Base class for all package errors."""


class UsageError(InfconvError, ValueError):
    """Input is outside the domain of the requested operation."""


class ParityError(UsageError):
    """A symmetric check was asked to run on a non-even function."""


class HypothesisViolation(UsageError):
    """The hypothesis of an inequality does not hold for the given input."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConfigError(UsageError):
    """Malformed suite configuration or unknown name."""


class ClassMembershipError(UsageError):
    """A function fails the F(C, eps) membership test required by a check."""


class GridInvariantError(InfconvError):
    """A GridSpec or GridFunction invariant is violated."""
