"""Exception hierarchy shared by every module."""


class FMellinError(Exception):
    """Base class for all errors raised by fmellin."""


class DomainError(FMellinError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericalError(FMellinError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy value."""


class PoleError(NumericalError):
    """A gamma-function argument sits on (or within the guard of) a pole."""

    def __init__(self, message, argument=None):
        super().__init__(message)
        self.argument = argument


class NonConvergenceError(NumericalError):
    """An iteration cap or refinement limit was hit before the tolerance."""


class DivergenceError(NumericalError):
    """The requested series or integral does not converge."""


class GammaOverflowError(NumericalError, OverflowError):
    """The result exceeds the double-precision range."""
