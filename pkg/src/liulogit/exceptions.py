"""Exception types raised by the numerical routines."""


class NumericalError(RuntimeError):
    """A linear-algebra step failed: a matrix that must be positive
    definite is not, or an internal consistency identity could not be
    verified at tolerance."""


class SeparationError(RuntimeError):
    """The binary responses are (quasi-)separable, so the maximum
    likelihood estimate diverges."""
