"""Exception hierarchy shared by all modules."""


class SasakiError(Exception):
    """Base class for every error raised by this package."""


class DegenerateMetricError(SasakiError):
    pass


class FrameError(SasakiError):
    """A triad failed its orthonormality invariant."""


class DomainError(SasakiError, ValueError):
    pass


class AccuracyError(SasakiError):
    """Adaptive quadrature could not reach the requested tolerance."""


class CapabilityError(SasakiError):
    """An evaluator cannot provide the derivative order a computation needs."""


class PreconditionError(SasakiError, ValueError):
    pass


class RankDeficientError(SasakiError):
    pass


class ConvergenceError(SasakiError):
    """Newton iteration failed; ``history`` holds the residual sup-norms."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class ExpressionSyntaxError(SasakiError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvaluationError(SasakiError, ArithmeticError):
    def __init__(self, message, offset=None):
        where = "" if offset is None else f" (at offset {offset})"
        super().__init__(message + where)
        self.offset = offset
