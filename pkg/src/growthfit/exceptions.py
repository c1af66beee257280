"""Exception hierarchy.

Every error raised by the package derives from :class:`GrowthFitError`, so
the command line can report a single machine-parseable class name.
"""


class GrowthFitError(Exception):
    """Base class for all package errors."""


class SpecialFunctionDomainError(GrowthFitError, ValueError):
    pass


class InvalidParameterError(GrowthFitError, ValueError):
    pass


class EvaluationError(GrowthFitError, ArithmeticError):
    """A density evaluation produced a non-finite or non-positive value."""


class IngestionError(GrowthFitError, ValueError):
    pass


class EmptySampleError(GrowthFitError, ValueError):
    pass


class DegenerateSampleError(GrowthFitError, ValueError):
    """The sample has zero variance, so scale estimates would diverge."""


class SampleSizeError(GrowthFitError, ValueError):
    pass


class CriterionDomainError(GrowthFitError, ValueError):
    pass


class MismatchedSampleError(GrowthFitError, ValueError):
    """Fits compared against each other were made on different samples."""


class TailDataError(GrowthFitError, ValueError):
    """Not enough (or degenerate) observations beyond a tail threshold."""


class ConfigError(GrowthFitError, ValueError):
    pass
