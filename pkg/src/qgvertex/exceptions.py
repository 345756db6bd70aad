"""Exception hierarchy shared by all modules."""


class VertexError(ValueError):
    """Base class for every error raised by qgvertex."""


class DimensionMismatch(VertexError):
    pass


class SingularMatrix(VertexError):
    pass


class NotUnitary(VertexError):
    pass


class NotHermitianUnitary(VertexError):
    pass


class NotUnitaryPS(VertexError):
    pass


class DegenerateGram(VertexError):
    pass


class MoreThanTwoEigenvalues(VertexError):
    """U is not annihilated by any monic quadratic; carries the fit residual."""

    def __init__(self, residual, message=None):
        self.residual = float(residual)
        super().__init__(
            message or f"U has more than two eigenvalues (closure residual {self.residual:.3e})"
        )


class NumericalInconsistency(VertexError):
    pass


class DegenerateForm(VertexError):
    pass


class ZeroReference(VertexError):
    pass


class NotMPS(VertexError):
    pass


class InvalidXi(VertexError):
    pass


class COutOfRange(VertexError):
    """Requested curvature factor lies outside the admissible interval."""

    def __init__(self, c, interval):
        self.c = float(c)
        self.interval = interval
        super().__init__(f"c = {self.c!r} is outside the admissible interval {interval}")


class OrderTooLarge(VertexError):
    pass
