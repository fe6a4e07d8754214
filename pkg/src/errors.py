"""
Errors: Typed Failures and Exit Codes

Every failure the lab can report maps to one exception class. Each class
carries the process exit code the CLI returns for it:
- 1: validation / verification failures (bad inputs, bad configs)
- 2: numeric / stability failures (integrator blow-up, expm trouble)
"""

from typing import Optional


class CurrentLabError(Exception):
    """Root of all lab errors."""

    exit_code = 1


# ===== Validation (exit 1) =====

class ValidationError(CurrentLabError):
    """Input rejected before any computation."""

    exit_code = 1


class ShapeError(ValidationError):
    """Matrix is not 2-D, not square, or dimensions disagree."""


class HermiticityError(ValidationError):
    """Matrix (or expectation value) is not Hermitian (real) within tolerance."""


class ProjectionError(ValidationError):
    """Matrix is not an orthogonal projection."""


class UnitarityError(ValidationError):
    """Basis change is not unitary."""


class DomainError(ValidationError):
    """Parameter outside its allowed range (negative rate, Bloch norm > 1, ...)."""


class DegenerateModelError(ValidationError):
    """Closed form undefined for this model (lambda + mu = 0)."""


class UnsupportedDimensionError(ValidationError):
    """Operation defined for qubits only."""


class MapNotHermiticityPreservingError(ValidationError):
    """Choi matrix is not Hermitian, so spectral tests are meaningless."""


class ConfigError(ValidationError):
    """Scenario config field failed validation."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


# ===== Numeric (exit 2) =====

class NumericError(CurrentLabError):
    """Computation ran but produced an untrustworthy result."""

    exit_code = 2


class StabilityError(NumericError):
    """Integrator diagnostics exceeded their thresholds."""

    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


class ExpmError(NumericError):
    """Matrix exponential did not produce a finite result."""


class ConsistencyError(NumericError):
    """Reconstructed object disagrees with its expected form."""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        super().__init__(message)
