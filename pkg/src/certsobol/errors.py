"""Exception hierarchy for certsobol.

Every error carries an ``exit_code`` used by the command-line front end and a
``context`` mapping with the location of the failure (time step, sample index,
training point, ...). The context is rendered into the message so that a
failure deep inside a Monte-Carlo loop still says where it happened.
"""

from typing import Any, ClassVar, Dict


class CertSobolError(Exception):
    """Base class of all errors raised by certsobol."""

    exit_code: ClassVar[int] = 1

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = dict(context)

    def with_context(self, **context: Any) -> "CertSobolError":
        """Attach extra context and return the same instance (for ``raise err.with_context(...)``)."""
        for key, value in context.items():
            self.context.setdefault(key, value)
        return self

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value!r}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class ConfigError(CertSobolError, ValueError):
    """Malformed configuration file or command-line values."""

    exit_code = 2


class NumericalError(CertSobolError):
    """A computation failed or produced a useless result."""

    exit_code = 3


class SolverDiverged(NumericalError):
    """A nodal value became non-finite or exceeded the magnitude cap."""


class RankDeficient(NumericalError):
    """The snapshot set cannot support the requested basis size."""


class BoundBlowup(NumericalError):
    """The certified state error bound exceeded its cap."""


class DegenerateVariance(NumericalError):
    """The empirical output variance is numerically zero."""


class DenominatorStraddlesZero(NumericalError):
    """The enclosure of the variance contains zero, so the index bounds are unbounded."""


class FitFailed(NumericalError):
    """The benchmark data show no metamodel convergence."""


class BasisFormatError(NumericalError):
    """A persisted reduced basis is corrupt, of an unknown version or not orthonormal."""


class InfeasibleRounding(CertSobolError):
    """No integer basis size meets the requested precision."""

    exit_code = 4
