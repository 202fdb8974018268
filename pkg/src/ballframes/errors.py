"""Exception and warning types shared across the package."""


class BallFramesError(Exception):
    """Base class for all package errors."""

    code = 1


class DomainError(BallFramesError, ValueError):
    """A parameter lies outside the range where the object is defined."""

    code = 2


class InvalidGroupElement(BallFramesError, ValueError):
    """Matrix blocks do not define an element of SU(n,1)."""

    code = 2


class NumericalDegeneracy(BallFramesError, ArithmeticError):
    """Denominator of a fractional-linear map vanished numerically."""

    code = 3


class ConvergenceFailure(BallFramesError, RuntimeError):
    code = 3


class NumericalBlowup(BallFramesError, ArithmeticError):
    """Integrand overflowed; usually a non-integrable parameter choice."""

    code = 3


class UnsupportedAtomExponent(BallFramesError, ValueError):
    code = 2


class DegenerateFamily(BallFramesError, RuntimeError):
    """Point family does not give a frame (or Riesz sequence) on the test space."""

    code = 3

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class CapacityExceeded(BallFramesError, RuntimeError):
    code = 4


class ConfigError(BallFramesError, ValueError):
    """Invalid experiment configuration; ``errors`` maps field -> message."""

    code = 2

    def __init__(self, errors):
        self.errors = dict(errors)
        msg = "; ".join(f"{k}: {v}" for k, v in self.errors.items())
        super().__init__(msg)


class TruncationWarning(UserWarning):
    """A series was truncated; ``tail_bound`` bounds the neglected part."""

    def __init__(self, message, tail_bound=float("nan")):
        super().__init__(message)
        self.tail_bound = tail_bound
