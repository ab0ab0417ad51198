"""Exception types shared across the package.

Two failure modes are distinguished everywhere: inputs outside a function's
domain (``DomainError``) and series or quadrature runs that exhaust their
budget before meeting tolerance (``ConvergenceError``).  Callers that want
to retry with a looser budget can catch the latter and inspect its fields.
"""

from __future__ import annotations


class DomainError(ValueError):
    """Input outside the mathematical domain of the requested quantity."""


class ConvergenceError(RuntimeError):
    """A truncated expansion or quadrature failed to meet its tolerance.

    Parameters
    ----------
    what:
        Name of the quantity or series that failed.
    last_term:
        Magnitude of the last computed term (or error estimate), so the
        caller can judge how far from convergence the run stopped.
    terms_used:
        Number of terms or evaluations consumed before giving up.
    """

    def __init__(self, what: str, last_term: float, terms_used: int):
        self.what = what
        self.last_term = float(last_term)
        self.terms_used = int(terms_used)
        super().__init__(
            f"{what}: no convergence after {terms_used} terms "
            f"(last term magnitude {self.last_term:.3e}); "
            "raise max_terms or loosen rel_tol"
        )


class RunawayError(RuntimeError):
    """A simulated path exceeded the hard event cap without terminating."""
