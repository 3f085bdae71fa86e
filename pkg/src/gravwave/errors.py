"""Exception hierarchy shared by all gravwave modules."""


class GravwaveError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GravwaveError, ValueError):
    pass


class NoPlusRootError(GravwaveError, ValueError):
    """Raised when an operation needs Y+ but (A, B) is not subcritical."""


class DomainError(GravwaveError, ValueError):
    pass


class TruncationError(GravwaveError, ValueError):
    """A flat profile does not fit below the truncation height Ly."""


class ContractViolationError(GravwaveError, ValueError):
    pass


class InvariantViolationError(GravwaveError, RuntimeError):
    pass


class NonConvergenceError(GravwaveError, RuntimeError):
    """An iterative solver hit its cap.  ``last`` carries the final iterate."""

    def __init__(self, message, last=None, history=None):
        super().__init__(message)
        self.last = last
        self.history = history


class EigenSolverError(GravwaveError, RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
