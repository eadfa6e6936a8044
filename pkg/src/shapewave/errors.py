"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: invalid input -> 2,
numerical invariant violation -> 3, solver non-convergence -> 4.
"""


class ShapewaveError(ValueError):
    """Base class for all toolkit errors."""


class InvalidInputError(ShapewaveError):
    """Malformed or inconsistent input: bad shapes, unparsable files,
    violated operation preconditions."""


class InvariantViolationError(ShapewaveError):
    """A numerical or structural invariant failed: domain-type invariants
    at construction, inconsistent curvature data, quality gates."""


class NoConvergenceError(ShapewaveError):
    """An iterative solver failed to reach its tolerance.

    Carries the last residual norm and the iteration count.
    """

    def __init__(self, message: str, residual_norm: float = float("nan"),
                 iterations: int = 0):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations
