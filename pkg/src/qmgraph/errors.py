class InvalidArgument(ValueError):
    """Raised when an argument violates an operation's precondition."""


class NotCompletelyPositive(ValueError):
    """Raised when a Choi matrix has an eigenvalue below the negative tolerance."""

    def __init__(self, min_eigenvalue: float, tol: float):
        self.min_eigenvalue = min_eigenvalue
        self.tol = tol
        super().__init__(
            f"Choi matrix is not positive semidefinite: min eigenvalue "
            f"{min_eigenvalue:.3e} < -{tol:g}"
        )
