"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a special function or sampler."""


class InputError(ValueError):
    """Malformed user input: table files, constraint text, configuration."""


class ConstraintSyntaxError(InputError):
    """Constraint text could not be parsed.

    Attributes
    ----------
    position : int
        Zero-based character offset where parsing failed.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class BudgetExceeded(RuntimeError):
    """Exact enumeration refused because the number of terms is too large.

    Use the Monte Carlo estimator instead.
    """


class EstimationError(RuntimeError):
    """A Monte Carlo estimate is unusable, e.g. a zero prior probability."""
