"""Exception types raised across the package."""


class WeylSteerError(Exception):
    """Base class for package errors."""


class NotCnotClassError(WeylSteerError, ValueError):
    """A gate expected in the CNOT class is not."""


class SingularStateError(WeylSteerError, ArithmeticError):
    """A steering system was evaluated where its matrix is not invertible."""

    def __init__(self, message, t=None, det=None):
        super().__init__(message)
        self.t = t
        self.det = det


class TrackingDomainError(WeylSteerError, ArithmeticError):
    """An analytic tracking integral hit a vanishing denominator."""

    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class InfeasibleError(WeylSteerError, ValueError):
    """Requested design parameters admit no real solution."""


class ReconstructionError(WeylSteerError, RuntimeError):
    """A steering trajectory fails to reproduce the propagated gate."""

    def __init__(self, message, t=None, fidelity=None):
        super().__init__(message)
        self.t = t
        self.fidelity = fidelity


class ConvergenceError(WeylSteerError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
