"""Exception and warning types raised across the package."""

from __future__ import annotations


class NopaNetError(Exception):
    """Base class for all errors raised by nopanet."""


class NonUnitaryInput(NopaNetError, ValueError):
    """A scattering matrix is too far from unitary to be repaired."""


class NonSymplecticInput(NopaNetError, ValueError):
    """A quadrature matrix is not orthogonal and symplectic."""


class IllPosedFeedback(NopaNetError, ArithmeticError):
    """``I - S22`` is singular: the feedback loop has no algebraic solution."""


class ResonantFrequency(NopaNetError, ArithmeticError):
    """``i*omega*I - A`` is singular at the requested frequency."""

    def __init__(self, omega: float, message: str | None = None):
        self.omega = omega
        super().__init__(message or f"i*omega*I - A is singular at omega = {omega!r} rad/s")


class InfeasiblePoint(NopaNetError, ArithmeticError):
    """The gradient of V(0) does not exist at this network."""


class InfeasibleStart(NopaNetError, ValueError):
    """The optimizer was started from a network that fails the feasibility guard."""


class RankDeficient(NopaNetError, ArithmeticError):
    """A matrix handed to the retraction has (numerically) lost rank."""


class MatrixFormatError(NopaNetError, ValueError):
    """A matrix or factor file does not match its declared schema."""


class UnitarityWarning(UserWarning):
    """An input was slightly non-unitary and has been re-projected."""


class StabilityWarning(UserWarning):
    """A squeezing value was computed for a network whose drift matrix is not Hurwitz."""


class ResonanceWarning(UserWarning):
    """A sweep frequency was skipped because the system is resonant there."""
