"""Exception and warning types shared across the package."""

from __future__ import annotations


class FracsolveError(Exception):
    """Base class for every error raised by :mod:`fracsolve`."""


class DomainError(FracsolveError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class PoleError(DomainError):
    """The gamma function was requested at one of its poles."""


class UnsupportedRegime(FracsolveError):
    """No closed-form solution is available for the requested parameters."""


class ConvergenceError(FracsolveError, ArithmeticError):
    """A series, quadrature or iteration failed to reach its tolerance."""


class RepeatedRootWarning(UserWarning):
    """The characteristic polynomial has (numerically) repeated roots."""
