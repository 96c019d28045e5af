"""Exception types raised across the package."""


class LoqcError(Exception):
    """Base class for all package errors."""


class DimensionError(LoqcError, ValueError):
    pass


class SizeGuardError(LoqcError, ValueError):
    pass


class ConservationError(LoqcError, ValueError):
    pass


class SequenceError(LoqcError, ValueError):
    pass


class ParameterError(LoqcError, ValueError):
    pass


class MismatchRegimeError(LoqcError, ValueError):
    pass


class ExtentError(LoqcError, ValueError):
    pass


class InconsistencyError(LoqcError, ValueError):
    pass


class ConfigError(LoqcError, ValueError):
    pass


class BudgetExceeded(LoqcError, RuntimeError):
    pass


class SpinIndexError(LoqcError, IndexError):
    pass
