"""Exception types raised across the package."""


class DickeEnvError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(DickeEnvError, ValueError):
    pass


class DimensionMismatch(DickeEnvError, ValueError):
    pass


class InvalidFactorIndex(DickeEnvError, IndexError):
    pass


class UnnormalizedState(DickeEnvError, ValueError):
    pass


class CutoffTooSmall(DickeEnvError, ValueError):
    pass


class InvalidSector(DickeEnvError, ValueError):
    pass


class ConstraintUnsatisfiable(DickeEnvError, RuntimeError):
    """Detuning draws could not satisfy the environment constraints."""


class TooManyConfigurations(DickeEnvError, ValueError):
    pass


class DimensionGuardExceeded(DickeEnvError, ValueError):
    pass


class InvalidRegime(DickeEnvError, ValueError):
    """Parameters fall outside the regime where an approximation holds."""


class RegimeWarning(UserWarning):
    pass
