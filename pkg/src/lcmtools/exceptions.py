"""Exception types raised across the package."""


class DomainError(ValueError):
    """Input lies outside the domain where an operation is defined."""


class CoprimalityError(DomainError):
    """Plant numerator and denominator share a (near) common root."""


class InfeasibleError(RuntimeError):
    """The synthesis program has no feasible point.

    Attributes
    ----------
    constraint : str
        Label of the most violated constraint at the least-infeasible point.
    violation : float
        Amount by which that constraint is violated.
    """

    def __init__(self, message, constraint=None, violation=None):
        super().__init__(message)
        self.constraint = constraint
        self.violation = violation


class SynthesisError(RuntimeError):
    """A synthesized controller failed its a posteriori verification."""
