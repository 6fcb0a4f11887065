"""
Exception hierarchy for the workbench.

Every failure raised by the numerical modules is a NumericalError carrying a
diagnostics dict; the CLI maps ConfigError to exit status 2 and NumericalError to
exit status 3 and serializes the diagnostics into its error record.
"""

from typing import Any, Dict, Optional


class WorkbenchError(Exception):
    """Base class for all workbench errors."""
    
    exit_code: int = 1
    
    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.diagnostics: Dict[str, Any] = dict(diagnostics or {})
    
    def to_record(self) -> Dict[str, Any]:
        """Machine-readable error record."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "diagnostics": self.diagnostics,
            "exit_code": self.exit_code,
        }


class ConfigError(WorkbenchError, ValueError):
    """Invalid run configuration or parameters."""
    
    exit_code = 2


class NumericalError(WorkbenchError):
    """A numerical procedure failed or could not certify its result."""
    
    exit_code = 3


class DimensionError(NumericalError):
    """Requested dense operator exceeds the allowed size."""


class HermiticityError(NumericalError):
    """Operator expected to be Hermitian is not."""


class DiagonalizationError(NumericalError):
    """Eigensolver failed or eigenpair residuals are too large."""


class IllConditionedSampleError(NumericalError):
    """Lambda sampling system is too ill-conditioned to invert."""


class NotAnEigenvectorError(NumericalError):
    """State is not an eigenvector of the transfer matrix within tolerance."""


class FiniteDifferenceError(NumericalError):
    """Step-halving disagreement exposed cancellation in a finite difference."""


class PolePointError(NumericalError):
    """A zero root sits on a pole of the energy formula."""


class BranchPointError(NumericalError):
    """A logarithm argument vanished or diverged."""


class ResidualOverflowError(NumericalError):
    """BAE residual overflowed despite log stabilization."""


class NewtonDivergenceError(NumericalError):
    """Newton iteration failed to reduce the residual."""


class RootCollisionError(NumericalError):
    """Two zero roots collided along the homotopy path."""


class SeriesConvergenceError(NumericalError):
    """Fourier series tail bound exceeds the accepted tolerance."""


class GridResolutionError(NumericalError):
    """Scan grid cannot resolve the requested feature."""


class IdentityCheckError(NumericalError):
    """An algebraic identity failed its residual threshold."""
