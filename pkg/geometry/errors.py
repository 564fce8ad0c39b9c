# geometry/errors.py
from __future__ import annotations

from typing import Optional


class SymspaceError(Exception):
    """Base class for every error raised by the geometry app."""


class ShapeError(SymspaceError, ValueError):
    pass


class DomainError(SymspaceError, ValueError):
    """
    Input outside the domain of a matrix function or map.

    `eigenvalue` names the offending eigenvalue when the failure is spectral
    (logm / sqrtm on the closed negative real axis, poles of a resolvent).
    """

    def __init__(self, message: str, eigenvalue: Optional[complex] = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotInvolutiveError(DomainError):
    pass


class SingularMatrixError(DomainError):
    pass


class Diverged(SymspaceError, ArithmeticError):
    """Overflow / blow-up. Stability experiments record it as a row status."""

    def __init__(self, message: str, norm: Optional[float] = None):
        super().__init__(message)
        self.norm = norm


class ConvergenceError(SymspaceError, ArithmeticError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e} iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class UnsupportedOrderError(SymspaceError, ValueError):
    pass


class PeriodError(SymspaceError, ValueError):
    pass


class LadderError(SymspaceError, ValueError):
    pass


class ConfigError(SymspaceError, ValueError):
    pass
