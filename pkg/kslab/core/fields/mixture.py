"""Gaussian mixtures: initial data with closed-form heat flow."""
from enum import Enum
import logging
import math
from typing import Iterable
import warnings

from attrs import define, field
import numpy as np

from ..constants import (
    MIXTURE_MAX_POINTS,
    MIXTURE_POINTS_PER_SIGMA,
    MIXTURE_RESOLUTION_TOL,
    MIXTURE_SIGMA_SPAN,
)
from ..errors import DomainError, ResolutionWarning
from ..special import GaussNormQuery, gaussian_lr_norm
from .kernels import regularization_factor

logger = logging.getLogger(__name__)

__all__ = [
    "Component",
    "GaussianMixture",
    "NormMethod",
    "heat_convolve_mixture",
    "linear_drift_b0",
    "grad_magnitude_lr_norm",
    "lq_norm_mixture",
]


def _positive_variance(instance, attribute, value):
    if not value > 0:
        raise DomainError(f"component variance must be > 0, got {value}")


@define(frozen=True)
class Component:
    weight: float = field(converter=float)
    mean: tuple = field(converter=lambda mean: tuple(float(v) for v in np.ravel(mean)))
    variance: float = field(converter=float, validator=_positive_variance)

    def to_dict(self):
        return {"weight": self.weight, "mean": list(self.mean), "variance": self.variance}


@define(frozen=True)
class GaussianMixture:
    """Sum of isotropic Gaussians w N(mean, variance I) in d dimensions."""

    components: tuple = field(converter=tuple)
    d: int = field(converter=int)

    def __attrs_post_init__(self):
        if not self.components:
            raise DomainError("a mixture needs at least one component")
        for component in self.components:
            if len(component.mean) != self.d:
                raise DomainError(
                    f"component mean {component.mean} does not have dimension {self.d}"
                )

    @classmethod
    def from_records(cls, records: Iterable[dict], d: int = None):
        components = tuple(
            Component(record["weight"], record["mean"], record["variance"])
            for record in records
        )
        if d is None and components:
            d = len(components[0].mean)
        return cls(components, d)

    @classmethod
    def standard(cls, d: int, variance: float = 1.0):
        return cls((Component(1.0, np.zeros(d), variance),), d)

    def to_records(self):
        return [component.to_dict() for component in self.components]

    def validate_probability(self):
        """Raise unless weights are positive and sum to one."""
        if any(component.weight <= 0 for component in self.components):
            raise DomainError("density mixture weights must be > 0")
        if not math.isclose(self.mass, 1.0, rel_tol=0, abs_tol=1e-12):
            raise DomainError(f"density mixture weights sum to {self.mass}, not 1")
        return self

    @property
    def weights(self):
        return np.array([component.weight for component in self.components])

    @property
    def means(self):
        return np.array([component.mean for component in self.components])

    @property
    def variances(self):
        return np.array([component.variance for component in self.components])

    @property
    def mass(self):
        return float(self.weights.sum())

    def translate(self, shift):
        shift = np.asarray(shift, dtype=float)
        return GaussianMixture(
            tuple(
                Component(c.weight, np.asarray(c.mean) + shift, c.variance)
                for c in self.components
            ),
            self.d,
        )

    def _terms(self, x):
        x = np.asarray(x, dtype=float)
        for component in self.components:
            offset = x - np.asarray(component.mean)
            sq = np.einsum("...i,...i->...", offset, offset)
            density = np.exp(-sq / (2 * component.variance)) / (
                2 * math.pi * component.variance
            ) ** (self.d / 2)
            yield component, offset, component.weight * density

    def evaluate(self, x):
        """Mixture density at points ``x`` of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1])
        for _component, _offset, value in self._terms(x):
            total += value
        return total

    def gradient(self, x):
        """Analytic gradient at points ``x`` of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape)
        for component, offset, value in self._terms(x):
            total -= offset * (value / component.variance)[..., np.newaxis]
        return total


def heat_convolve_mixture(m: GaussianMixture, t: float) -> GaussianMixture:
    """g_t * m: every variance grows by t."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return m
    return GaussianMixture(
        tuple(Component(c.weight, c.mean, c.variance + t) for c in m.components), m.d
    )


def linear_drift_b0(
    m_c0: GaussianMixture, t: float, x, lam: float = 0.0, epsilon: float = 0.0
):
    """b0^eps(t, x) = e^(-lam t) (t/(t+eps))^(d/2) grad(g_t * c0)(x)."""
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    factor = math.exp(-lam * t) * float(regularization_factor(t, epsilon, m_c0.d / 2))
    return factor * heat_convolve_mixture(m_c0, t).gradient(x)


class NormMethod(Enum):
    auto = 0
    closed_form_single = 1
    grid_quadrature = 2


def grad_magnitude_lr_norm(d: int, r: float, t: float):
    """|| |grad g_t| ||_r by radial reduction."""
    if math.isinf(r):
        return math.exp(-0.5) * (2 * math.pi * t) ** (-d / 2) / math.sqrt(t)
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    log_power = (
        -r * math.log(t)
        - (d * r / 2) * math.log(2 * math.pi * t)
        + math.log(sphere / 2)
        + ((r + d) / 2) * math.log(2 * t / r)
        + math.lgamma((r + d) / 2)
    )
    return math.exp(log_power / r)


def _grid_bounds(m: GaussianMixture):
    sigma = math.sqrt(m.variances.max())
    means = m.means
    return [
        (
            means[:, axis].min() - MIXTURE_SIGMA_SPAN * sigma,
            means[:, axis].max() + MIXTURE_SIGMA_SPAN * sigma,
        )
        for axis in range(m.d)
    ]


def _grid_spacing(m: GaussianMixture, bounds):
    """Spacing resolving the narrowest component, coarsened to stay under the point cap."""
    narrowest = math.sqrt(m.variances.min())
    spacing = narrowest / MIXTURE_POINTS_PER_SIGMA
    volume = math.prod(upper - lower for lower, upper in bounds)
    if volume / spacing**m.d <= MIXTURE_MAX_POINTS:
        return spacing
    spacing = (volume / MIXTURE_MAX_POINTS) ** (1 / m.d)
    if spacing > narrowest:
        raise DomainError(
            f"grid norm needs more than {MIXTURE_MAX_POINTS} points: component widths "
            f"{narrowest:.3g} to {math.sqrt(m.variances.max()):.3g} in d={m.d}"
        )
    logger.info("grid norm spacing coarsened to %.3g for %d points", spacing, MIXTURE_MAX_POINTS)
    return spacing


def _grid_axes(bounds, spacing: float):
    axes = []
    for lower, upper in bounds:
        # Even point count so the every-other-point subgrid spans the same box.
        count = 2 * math.ceil((upper - lower) / spacing / 2) + 1
        axes.append(np.linspace(lower, upper, count))
    return axes


def _grid_norm(values: np.ndarray, r: float, cell: float):
    if math.isinf(r):
        return float(np.abs(values).max())
    return float((np.sum(np.abs(values) ** r) * cell) ** (1 / r))


def lq_norm_mixture(
    m: GaussianMixture,
    r: float,
    method: NormMethod = NormMethod.auto,
    gradient: bool = False,
):
    """||m||_r, or || |grad m| ||_r with ``gradient=True``."""
    if not r >= 1:
        raise DomainError(f"r must be >= 1, got {r}")
    if method is NormMethod.auto:
        method = (
            NormMethod.closed_form_single
            if len(m.components) == 1
            else NormMethod.grid_quadrature
        )
    if method is NormMethod.closed_form_single:
        if len(m.components) != 1:
            raise DomainError("closed form needs a single-component mixture")
        (component,) = m.components
        if gradient:
            return abs(component.weight) * grad_magnitude_lr_norm(m.d, r, component.variance)
        return abs(component.weight) * gaussian_lr_norm(
            GaussNormQuery(m.d, r, component.variance)
        )

    bounds = _grid_bounds(m)
    axes = _grid_axes(bounds, _grid_spacing(m, bounds))
    points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    if gradient:
        values = np.linalg.norm(m.gradient(points), axis=-1)
    else:
        values = m.evaluate(points)
    cell = math.prod(axis[1] - axis[0] for axis in axes)
    fine = _grid_norm(values, r, cell)
    coarse = _grid_norm(values[(slice(None, None, 2),) * m.d], r, cell * 2**m.d)
    error = abs(fine - coarse) / fine if fine else 0.0
    if error > MIXTURE_RESOLUTION_TOL:
        warnings.warn(
            f"grid norm r={r} resolved to {error:.2e} relative only",
            ResolutionWarning,
            stacklevel=2,
        )
    logger.debug(
        "grid norm r=%g on %s points: %g (est. error %.1e)", r, values.shape, fine, error
    )
    return fine
