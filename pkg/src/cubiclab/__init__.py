"""cubiclab: cubic Dirichlet L-functions at s=1 and their random Euler-product model."""

from cubiclab._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"


class BudgetError(RuntimeError):
    """A requested computation exceeds the configured memory/size budget."""


class PrecondError(ValueError):
    """An operation precondition is violated."""


class NoConvergenceError(RuntimeError):
    """An iterative solver failed to converge; carries the last bracket."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


__all__ = ["BudgetError", "PrecondError", "NoConvergenceError", "kernel_backend", "__version__"]
