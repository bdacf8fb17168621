"""Exception hierarchy."""


class AplabError(Exception):
    pass


class InvalidArgument(AplabError, ValueError):
    pass


class DomainError(AplabError, ValueError):
    """A cellwise transform hit a value outside its domain."""


class SingularPointError(AplabError, ValueError):
    """Evaluation requested exactly at a singularity of the operator."""


class ToleranceNotMet(AplabError, RuntimeError):
    """Quadrature did not reach the requested tolerance.

    The best estimate is kept on ``estimate`` together with the error bound
    reported by the integrator.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class InvalidWeight(AplabError, ValueError):
    pass


class InsufficientData(AplabError, ValueError):
    pass


class InsufficientVariation(AplabError, ValueError):
    pass
