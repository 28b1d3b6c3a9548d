"""Exception hierarchy shared by every module of the package."""


class SwissCheeseError(Exception):
    pass


class PoleError(SwissCheeseError, ZeroDivisionError):
    """A rational function was evaluated at (or numerically at) one of its poles."""


class PoleOnContourError(PoleError):
    pass


class DomainError(SwissCheeseError, ValueError):
    """Arguments lie outside the region where an estimate is valid."""


class PrecisionError(DomainError):
    """The point is too close to a pole ring to be resolved in the working precision."""


class PoleInXError(DomainError):
    """A test function has a pole in X, so it is not an element of R_0(X)."""


class ResourceError(SwissCheeseError):
    """A materialization would exceed a configured size cap."""


class BudgetError(SwissCheeseError):
    """A construction failed its budget invariant."""


class DegenerateError(SwissCheeseError, ValueError):
    pass


class SearchExhausted(SwissCheeseError):
    pass


class ToleranceNotMet(SwissCheeseError):
    """Adaptive quadrature stopped at its panel cap above the requested tolerance.

    The best available result, with its honest error estimate, is attached as
    ``result``.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result
