"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical routine did not converge."""


class DegenerateCenteringError(ValueError):
    """Mode centering produced a shape parameter with no interior mode."""


class NotAttainableError(RuntimeError):
    """A design target cannot be met inside the search range.

    ``best`` holds the most favourable metric value seen during the search.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
