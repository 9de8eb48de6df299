class InvalidDimensionError(ValueError):
    """Raised when a dimension is outside the range an operation supports,
    e.g. N < 2 or a prime label that is not an odd prime.

    """

    pass


class InvalidLabelError(ValueError):
    """Raised for a basis label that is zero modulo p."""

    pass


class InvalidProbabilityError(ValueError):
    """Raised when a vector is not a probability vector (negative entries or a sum other than 1)."""

    pass


class InvalidMatrixError(ValueError):
    """Raised for a matrix of the wrong shape, or one that fails the unitarity check."""

    pass


class NotBistochasticError(ValueError):
    pass


class NotUnistochasticError(ValueError):
    pass


class OutOfSectionError(ValueError):
    """Raised when chart coordinates (u, v) fall outside a cross section's domain."""

    pass


class NonConvergedError(RuntimeError):
    """Raised when the multistart solver exhausts its round budget without a stable count.

    The per-round count history is kept on the exception so that callers (and experiment
    reports) can show the stabilization evidence.

    """

    def __init__(self, message, rounds=()):
        super().__init__(message)
        self.rounds = list(rounds)


class ChartFailureError(ValueError):
    """Raised when the distinguished component of an image vector vanishes, so the affine
    chart is not defined at that point.

    """

    pass


class NotAnIntersectionError(ValueError):
    pass


class ContinuumError(ValueError):
    """Raised when a finite list of intersection points is requested for a pair of tori that
    coincide or meet along curves.

    """

    pass


class UnknownFigureError(ValueError):
    pass
