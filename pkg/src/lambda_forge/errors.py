"""Exception hierarchy. ``NumericError`` subclasses map to CLI exit code 3."""


class LambdaForgeError(Exception):
    pass


class ConfigError(LambdaForgeError):
    pass


class NumericError(LambdaForgeError, ArithmeticError):
    pass


class PoleAtNonPositiveInteger(NumericError):
    pass


class PoleAtOne(NumericError):
    pass


class Overflow(NumericError, OverflowError):
    pass


class AccuracyNotReached(NumericError):
    pass


class DomainError(NumericError, ValueError):
    pass


class PointInsideDisc(NumericError, ValueError):
    pass


class ZeroDenominator(NumericError, ZeroDivisionError):
    pass


class InfeasibleGeometry(NumericError, ValueError):
    pass


class BudgetUnattainable(NumericError):
    pass


class PoleOnBoundary(NumericError):
    pass


class UncancelledPole(NumericError):
    pass


class BranchTrackingFailure(NumericError):
    pass


class FitResidualTooLarge(NumericError):
    pass


class ZeroOnBoundary(NumericError):
    pass


class SamplingBudgetExceeded(NumericError):
    pass


class NoConvergence(NumericError):
    pass


class SymmetryViolation(NumericError):
    pass


class DegreeMismatch(NumericError, ValueError):
    pass


class IllConditioned(NumericError):
    pass


class PipelineError(NumericError):
    """A numeric failure re-raised with the name of the pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
