"""Exception types shared across the package.

Plain ``ValueError`` is used for malformed arguments; the classes here cover
failures that callers may want to distinguish (the CLI maps them to exit
codes).
"""


class InternalConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


class CapacityError(RuntimeError):
    """An enumeration exceeded its configured size guard.

    ``partial`` holds whatever results were produced before the abort, so a
    caller can still report them.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []


class IdentificationError(RuntimeError):
    """Base class for failures of the input/output identification stage."""


class NotFullOrderError(IdentificationError):
    """The realized model order is below the known agent count."""


class BranchAmbiguityError(IdentificationError):
    """The discrete system matrix has a non-positive eigenvalue, so the
    principal matrix logarithm is not defined; the sampling period is too
    large or an unobservable mode collapsed to zero."""


class IdentificationQualityError(IdentificationError):
    """Identified quantities are too far from integers to be trusted."""
