"""Exception types shared across the package."""
from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class QuadratureError(NumericalError):
    pass


class ResolutionError(NumericalError):
    """Sampling grid too coarse for the requested derivative stencil."""


class DegenerateConditionError(ValueError):
    """The quantization condition collapses for the given parameters."""
