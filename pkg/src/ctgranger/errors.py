"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`CtGrangerError`, so callers (and the CLI) can map failures to exit
codes without catching unrelated exceptions.
"""


class CtGrangerError(Exception):
    """Base class for all package errors."""


class InputError(CtGrangerError, ValueError):
    """Arguments are malformed or outside the supported domain."""


class StabilityError(CtGrangerError):
    """A model that must be stable (or a path that must stay finite) is not."""


class NumericalError(CtGrangerError, ArithmeticError):
    """A matrix that must be positive definite or nonsingular is not."""


class SingularityError(NumericalError):
    """A linear matrix equation has no unique solution."""


class TruncationError(CtGrangerError):
    """An infinite sequence did not decay within the allowed length."""


class ConvergenceError(CtGrangerError):
    """An iteration failed to reach its tolerance."""


class FilterError(CtGrangerError):
    """A filter is not causal, stable and minimum-phase."""
