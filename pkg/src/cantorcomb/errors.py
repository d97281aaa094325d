"""Exception types raised across the package."""


class DepthError(ValueError):
    """A requested construction level exceeds the configured depth or cap."""


class AdmissibilityError(ValueError):
    """The pair (p, lambda) violates 2 * lambda**(2 - p) < 1."""

    def __init__(self, p: float, lam: float):
        import math

        self.p = p
        self.lam = lam
        threshold = 2.0 - math.log(2.0) / math.log(1.0 / lam)
        self.threshold = threshold
        super().__init__(
            f"inadmissible pair p={p!r}, lambda={lam!r}: need "
            f"p < 2 - log 2 / log(1/lambda) = {threshold:.6f}"
        )


class PreconditionError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """Adaptive integration ran out of subdivision budget."""

    def __init__(self, message: str, segment=None):
        super().__init__(message)
        self.segment = segment


class StageError(RuntimeError):
    """Failure inside one stage of the experiment pipeline."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
