"""Exception types shared across the package.

Domain violations raise plain ValueError.  The types below mark numeric
failures that must abort a computation instead of silently corrupting it.
"""


class NumericError(RuntimeError):
    """Pivot underflow/overflow or an untrusted branch of a square root."""


class PositivityError(NumericError):
    """An integrand denominator evaluated to a non-positive value."""


class DivergenceError(NumericError):
    """Batch means of a quadrature run behave like a non-integrable input."""
