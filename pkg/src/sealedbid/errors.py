"""Semantic exception hierarchy.

Public entry points raise these instead of bare ValueError/ArithmeticError so
callers (and the CLI exit-code mapping) can tell bad input apart from numerical
trouble.
"""


class SealedBidError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SealedBidError, ValueError):
    """Inputs violate a documented contract: domain, schema, or invariant."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        # optional list of (path, message) pairs from scenario validation
        self.errors = list(errors) if errors else [("", message)]


class NumericalError(SealedBidError, ArithmeticError):
    """A numerical routine failed: non-finite objective, quadrature blow-up."""


class InfeasibleScenarioError(SealedBidError):
    """The bid domain is empty (reserve or bid floor at or above value/wealth)."""
