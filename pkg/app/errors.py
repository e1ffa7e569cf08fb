"""
Exception hierarchy shared by the services and the command line.

Input problems map to exit status 2, failed checks and refuted hypotheses to 1.
"""
from typing import Any, Optional


class McGroupoidError(Exception):
    """Base class for every error raised by the toolkit."""
    pass


class InputError(McGroupoidError):
    """Exception raised for malformed documents, unknown names or out-of-range indices."""
    pass


class UnsupportedArityError(InputError):
    """Exception raised when a bracket is evaluated above the declared max arity."""
    pass


class PreconditionError(McGroupoidError):
    """
    Exception raised when an operation's mathematical precondition fails.

    The offending residual (for example curv(α) for a non-MC element) is kept
    on the exception so it can be reported.
    """

    def __init__(self, message: str, residual: Optional[Any] = None):
        super().__init__(message)
        self.residual = residual


class ContractViolation(McGroupoidError):
    """Exception raised when an independent post-condition check fails."""

    def __init__(self, message: str, residual: Optional[Any] = None):
        super().__init__(message)
        self.residual = residual


class ConvergenceError(ContractViolation):
    """Exception raised when a fixed-point iteration does not stabilise in time."""
    pass


class HypothesisRefuted(McGroupoidError):
    """
    Exception raised when a layer problem of a transfer construction is unsolvable.

    This is a counterexample to the filtered quasi-isomorphism hypothesis, not an
    internal failure: ``weight`` and ``degree`` locate the graded piece and
    ``witness`` is the offending class (an Element) when one is available.
    """

    def __init__(self, message: str, weight: int, degree: int, witness: Optional[Any] = None,
                 report: Optional[Any] = None):
        super().__init__(message)
        self.weight = weight
        self.degree = degree
        self.witness = witness
        self.report = report
