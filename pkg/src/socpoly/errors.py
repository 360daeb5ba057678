"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class PoleError(DomainError):
    """The requested value sits on a pole (or a zero of a reciprocal)."""


class ConvergenceWarning(RuntimeWarning):
    """A numerical integral may not have converged to its target accuracy."""


class MixingWarning(RuntimeWarning):
    """A Markov chain's acceptance rate is outside the healthy band."""


class AccuracyWarning(RuntimeWarning):
    """An asymptotic approximation is used outside its validity range."""
