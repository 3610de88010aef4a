"""Exceptions and warnings raised across kslab."""
from attrs import define


class DomainError(ValueError):
    """Input is outside the domain of the function."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not converge."""


class ConfigError(ValueError):
    """Run configuration is not valid."""


class ConfigMismatchError(ValueError):
    """Runs being compared were not made from compatible configurations."""


class BackendMismatchError(ValueError):
    """Drift backend is not usable with the given settings."""


class CutoffError(ValueError):
    """Kernel would be evaluated at vanishing time lag."""


class StabilityError(ValueError):
    """Time step violates the explicit stability bound."""


class GridMismatchError(ValueError):
    """Fields do not live on the same grid."""


class InsufficientHistoryError(ValueError):
    """Retained snapshots are too coarse for the requested time integral."""


@define(frozen=True)
class BlowUpReport:
    """Where and how a run left the bounded regime."""

    t: float
    step: int
    sup_norm: float
    reason: str

    def to_dict(self):
        return {"t": self.t, "step": self.step, "sup_norm": self.sup_norm, "reason": self.reason}


class BlowUpError(ArithmeticError):
    """Density exceeded its cap or became non-finite."""

    def __init__(self, report: BlowUpReport):
        super().__init__(
            f"blow-up at t={report.t:.6g} (step {report.step}): {report.reason}"
        )
        self.report = report


class NonFiniteParticleError(ArithmeticError):
    """A particle position became non-finite."""

    def __init__(self, index: int, t: float, drift_magnitude: float):
        super().__init__(
            f"particle {index} non-finite at t={t:.6g} (|drift|={drift_magnitude:.6g})"
        )
        self.index = index
        self.t = t
        self.drift_magnitude = drift_magnitude


class ResolutionWarning(UserWarning):
    """Grid quadrature truncation error exceeds tolerance."""


class BandwidthWarning(UserWarning):
    """KDE bandwidth is small relative to local particle count."""
