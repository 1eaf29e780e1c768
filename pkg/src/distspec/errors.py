"""Exception types raised by distspec."""


class DistSpecError(Exception):
    """Base class for all distspec errors."""


class DimensionError(DistSpecError, ValueError):
    """Input arrays have incompatible shapes."""


class EvaluationError(DistSpecError, ArithmeticError):
    """A model or objective produced non-finite values."""


class SingularDesignError(DistSpecError, ArithmeticError):
    """The design (or gradient) matrix is numerically rank deficient."""


class CalibrationError(DistSpecError, RuntimeError):
    """Too many bootstrap replicates failed to refit."""


class DataError(DistSpecError, ValueError):
    """Input data cannot be loaded or transformed as requested."""
