"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data violates a domain contract (bad shapes, failed defining relation)."""


class NumericalHealthError(RuntimeError):
    """A computation produced internally inconsistent numbers.

    Raised when quantities that must agree in exact arithmetic (equivalent
    conditions, group closure of a spectral set, positivity of a Gram matrix)
    disagree beyond tolerance. Signals either a hypothesis violation in the
    input or a degenerate numerical regime; never silently rounded away.
    """
