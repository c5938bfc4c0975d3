class InputError(ValueError):
    """Arguments violate a documented precondition."""


class NumericalError(ArithmeticError):
    """A numerical routine failed (singular pivot, non-convergence)."""


class RejectedSample(RuntimeError):
    """A random draw violated an acceptance rule; the caller may resample."""
