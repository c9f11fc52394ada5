"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(ValueError):
    """Morphisms or matrices with incompatible boundaries were combined."""


class NotDivisible(ArithmeticError):
    """Exact division of Laurent polynomials left a nonzero remainder."""


class InvariantViolation(AssertionError):
    """A guaranteed mathematical invariant failed (signals an arithmetic bug)."""


class ConvergenceError(RuntimeError):
    """An iterative eigen-solver did not converge."""


class ResourceError(RuntimeError):
    """The requested computation exceeds the configured size cap."""
