"""Exception hierarchy shared by all modules."""


class HDCHError(Exception):
    """Base class for every error raised by the package."""


class NonZeroMean(HDCHError, ValueError):
    pass


class OutOfRange(HDCHError, ValueError):
    pass


class MissingEpsilon(HDCHError, ValueError):
    pass


class NoRoot(HDCHError, ValueError):
    pass


class InvalidParams(HDCHError, ValueError):
    pass


class NotPositiveCoefficient(HDCHError, ValueError):
    pass


class NegativeInput(HDCHError, ValueError):
    pass


class EmptyTrajectory(HDCHError, ValueError):
    pass


class ConfigParse(HDCHError, ValueError):
    pass


class SolverFailure(HDCHError, RuntimeError):
    """Raised when an iterative solver does not reach its tolerance."""


class NoConvergence(SolverFailure):
    def __init__(self, message, residual=None, iterations=None, last=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.last = last


class NewtonDiverged(SolverFailure):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
