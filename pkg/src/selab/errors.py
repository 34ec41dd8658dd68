"""Exception types raised across the toolkit."""


class SelabError(Exception):
    """Base class for all toolkit errors."""


# parameter / contract violations
class UnsupportedExponent(SelabError, ValueError):
    pass


class UnsupportedDimension(SelabError, ValueError):
    pass


class SingularExponent(SelabError, ValueError):
    pass


class InvalidCoefficients(SelabError, ValueError):
    pass


class InvalidRange(SelabError, ValueError):
    pass


class InvalidCutoff(SelabError, ValueError):
    pass


class InvalidKernel(SelabError, ValueError):
    pass


class NonOscillatory(SelabError, ValueError):
    pass


class NonpositiveField(SelabError, ValueError):
    pass


class OutOfDomain(SelabError, ValueError):
    pass


class MaskViolation(SelabError, ValueError):
    pass


class LogSingularity(SelabError, ValueError):
    pass


class HypothesisViolated(SelabError, ValueError):
    pass


class EmptySublevelSet(SelabError, ValueError):
    pass


# numerical outcomes
class TouchdownDetected(SelabError, RuntimeError):
    """The solution reached the positivity floor."""

    def __init__(self, message, r=None):
        super().__init__(message)
        self.r = r


class NoSolutionInBracket(SelabError, RuntimeError):
    pass


class NoPositiveSolution(SelabError, RuntimeError):
    pass


class BudgetExceeded(SelabError, RuntimeError):
    def __init__(self, message, best=None, info=None):
        super().__init__(message)
        self.best = best
        self.info = info


class LinearSolveFailed(SelabError, RuntimeError):
    pass


class BracketStalled(SelabError, RuntimeError):
    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class NewtonStalled(SelabError, RuntimeError):
    pass


class EigenBudgetExceeded(SelabError, RuntimeError):
    pass


class CrossCheckFailed(SelabError, RuntimeError):
    """An analytic result disagreed with its numerical cross-check."""
