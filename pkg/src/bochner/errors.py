"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class SymmetryError(DomainError):
    """A curvature tensor violates its algebraic symmetries."""


class NumericError(ArithmeticError):
    """A numerical procedure failed (non-convergence, underflow, divergence)."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
