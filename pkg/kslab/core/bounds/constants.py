"""Explicit constants and smallness conditions of the Keller-Segel model."""
import logging
import math
from typing import Optional

from attrs import define, field
import numpy as np
from scipy import optimize

from ..errors import DomainError
from ..special import C1Convention, beta, c0, c1

logger = logging.getLogger(__name__)

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "ConditionReport",
    "derive_constants",
    "check_existence_condition",
    "check_uniqueness_condition",
    "existence_threshold",
    "drift_bound_constant",
    "linear_drift_lr_bound",
    "nonlinear_drift_lr_bound",
]


def _non_negative(instance, attribute, value):
    if not value >= 0:
        raise DomainError(f"{attribute.name} must be >= 0, got {value}")


def _positive(instance, attribute, value):
    if not value > 0:
        raise DomainError(f"{attribute.name} must be > 0, got {value}")


@define(frozen=True)
class ModelParams:
    """Model parameters plus the two initial-data norms every constant needs.

    Parameters
    ----------
    d: int
        Space dimension.
    chi: float
        Chemo-attractant sensitivity.
    lam: float
        Decay rate of the chemical.
    T: float
        Time horizon.
    q: float
        Lebesgue exponent of the density estimate; defaults to 3d/2.
    norm_grad_c0_d: float
        ||grad c0||_d.
    norm_p0_dhalf: float
        ||rho0||_{d/2}.
    """

    d: int = field(converter=int, validator=_positive)
    chi: float = field(converter=float, validator=_non_negative)
    lam: float = field(default=0.0, converter=float, validator=_non_negative)
    T: float = field(default=1.0, converter=float, validator=_positive)
    q: float = field(converter=float)
    norm_grad_c0_d: float = field(default=0.0, converter=float, validator=_non_negative)
    norm_p0_dhalf: float = field(default=0.0, converter=float, validator=_non_negative)

    @q.default
    def _default_q(self):
        return 1.5 * self.d

    @property
    def condition_applicable(self):
        return self.d >= 3

    def with_chi(self, chi: float):
        return ModelParams(
            self.d, chi, self.lam, self.T, self.q, self.norm_grad_c0_d, self.norm_p0_dhalf
        )


@define(frozen=True)
class DerivedConstants:
    """Exponents, constants and condition values derived from ModelParams."""

    convention: C1Convention
    q_prime: float
    q_tilde1: float
    q_tilde2: float
    A: float
    B: float
    K1: float
    K2: float
    discriminant: float
    C_q: Optional[float]
    condition_lhs: float
    uniqueness_lhs: Optional[float]

    def polynomial(self, params: ModelParams):
        """P(z) = K1 chi z^2 + (K2 chi ||grad c0||_d - 1) z + C0(q~2) ||p0||_{d/2}."""
        return np.polynomial.Polynomial(
            [
                c0(params.d, self.q_tilde2) * params.norm_p0_dhalf,
                self.K2 * params.chi * params.norm_grad_c0_d - 1,
                self.K1 * params.chi,
            ]
        )

    def to_dict(self):
        return {
            "convention": self.convention.name,
            "q_prime": self.q_prime,
            "q_tilde1": self.q_tilde1,
            "q_tilde2": self.q_tilde2,
            "A": self.A,
            "B": self.B,
            "K1": self.K1,
            "K2": self.K2,
            "discriminant": self.discriminant,
            "C_q": self.C_q,
            "condition_lhs": self.condition_lhs,
            "uniqueness_lhs": self.uniqueness_lhs,
        }


@define(frozen=True)
class ConditionReport:
    """Value of a smallness condition. A violated condition is data, not an error."""

    name: str
    lhs: float
    convention: C1Convention
    applicable: bool = True

    @property
    def satisfied(self):
        return bool(self.lhs < 1)

    @property
    def margin(self):
        return 1 - self.lhs

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "satisfied": self.satisfied,
            "margin": self.margin,
            "applicable": self.applicable,
            "convention": self.convention.name,
        }


def _check_q(params: ModelParams):
    d, q = params.d, params.q
    if d < 2:
        raise DomainError(f"constants need d >= 2, got d={d}")
    if not d < q < 2 * d:
        raise DomainError(f"q must lie in ({d}, {2 * d}), got q={q}")


def _time_beta(d: int, q: float):
    """The beta factor shared by K1 and K2."""
    q_prime = q / (q - 1)
    return beta(1.5 - d / q, (d / 2) * (1 - 1 / q_prime) + 0.5)


def _root(linear: float, quadratic: float, constant: float, discriminant: float):
    """Smallest root of quadratic z^2 - linear z + constant, stable as quadratic -> 0."""
    if discriminant < 0 or linear <= 0:
        return None
    if constant == 0:
        return 0.0
    return 2 * constant / (linear + math.sqrt(discriminant))


def _uniqueness_lhs(params: ModelParams, C_q: float, convention: C1Convention):
    d, q = params.d, params.q
    q_prime = q / (q - 1)
    bracket = params.norm_grad_c0_d + C_q * c1(d, q_prime, convention) * (
        beta(d / (2 * q) + 0.5, 1 - d / (2 * q)) + 1
    )
    return params.chi * c1(d, 1, convention) * beta(0.5, 0.5) * bracket


def derive_constants(
    params: ModelParams, convention: C1Convention = C1Convention.exact
) -> DerivedConstants:
    """Compute K1, K2 = A, B, C_q and both condition left-hand sides."""
    _check_q(params)
    d, q, chi = params.d, params.q, params.chi
    grad_norm, p0_norm = params.norm_grad_c0_d, params.norm_p0_dhalf
    q_prime = q / (q - 1)
    q_tilde1 = d * q / ((d - 1) * q + d)
    q_tilde2 = d * q / (d + (d - 2) * q)
    c1_q_prime = c1(d, q_prime, convention)
    time_beta = _time_beta(d, q)

    K1 = d * c1_q_prime * c1(d, 1, convention) * time_beta * beta(1 - d / (2 * q), 0.5)
    K2 = d * c1_q_prime * c0(d, q_tilde1) * time_beta
    A = K2
    B = 2 * math.sqrt(c0(d, q_tilde2) * K1)

    linear = 1 - A * chi * grad_norm
    discriminant = linear**2 - B**2 * chi * p0_norm
    condition_lhs = A * chi * grad_norm + B * math.sqrt(chi * p0_norm)
    C_q = _root(linear, K1 * chi, c0(d, q_tilde2) * p0_norm, discriminant)
    uniqueness_lhs = None if C_q is None else _uniqueness_lhs(params, C_q, convention)
    logger.debug(
        "constants d=%d q=%g chi=%g (%s): K1=%g K2=%g C_q=%s",
        d, q, chi, convention.name, K1, K2, C_q
    )
    return DerivedConstants(
        convention=convention,
        q_prime=q_prime,
        q_tilde1=q_tilde1,
        q_tilde2=q_tilde2,
        A=A,
        B=B,
        K1=K1,
        K2=K2,
        discriminant=discriminant,
        C_q=C_q,
        condition_lhs=condition_lhs,
        uniqueness_lhs=uniqueness_lhs,
    )


def check_existence_condition(
    params: ModelParams, convention: C1Convention = C1Convention.exact
) -> ConditionReport:
    constants = derive_constants(params, convention)
    return ConditionReport(
        name="existence",
        lhs=constants.condition_lhs,
        convention=convention,
        applicable=params.condition_applicable,
    )


def check_uniqueness_condition(
    params: ModelParams, C_q: float, convention: C1Convention = C1Convention.exact
) -> ConditionReport:
    _check_q(params)
    return ConditionReport(
        name="uniqueness",
        lhs=_uniqueness_lhs(params, C_q, convention),
        convention=convention,
        applicable=params.condition_applicable,
    )


def existence_threshold(
    params: ModelParams, convention: C1Convention = C1Convention.exact, xtol: float = 1e-14
):
    """The chi at which the existence condition becomes an equality."""
    if params.norm_grad_c0_d == 0 and params.norm_p0_dhalf == 0:
        return math.inf

    def excess(chi):
        return check_existence_condition(params.with_chi(chi), convention).lhs - 1

    upper = 1.0
    while excess(upper) < 0:
        upper *= 2
    return optimize.brentq(excess, 0.0, upper, xtol=xtol)


def drift_bound_constant(
    params: ModelParams, C_q: float, convention: C1Convention = C1Convention.exact
):
    """Bound on sqrt(t) |b_i(t, x)| for every component i of the drift."""
    _check_q(params)
    d, q = params.d, params.q
    q_prime = q / (q - 1)
    linear = params.norm_grad_c0_d * c0(d, d / (d - 1))
    nonlinear = c1(d, q_prime, convention) * C_q * beta(1 - d / (2 * q), d / (2 * q) + 0.5)
    return params.chi * (linear + nonlinear)


def linear_drift_lr_bound(params: ModelParams, r: float, t: float):
    """chi ||b0_i(t)||_r <= chi ||grad c0||_d C0(dr/((d-1)r+d)) / t^(1/2 - d/(2r))."""
    d = params.d
    if not r >= d:
        raise DomainError(f"r must be >= d={d}, got {r}")
    if math.isinf(r):
        young = d / (d - 1)
        decay = 0.5
    else:
        young = d * r / ((d - 1) * r + d)
        decay = 0.5 - d / (2 * r)
    return params.chi * params.norm_grad_c0_d * c0(d, young) / t**decay


def nonlinear_drift_lr_bound(
    d: int,
    r: float,
    weighted_norm: float,
    t: float,
    convention: C1Convention = C1Convention.exact,
):
    """|| int_0^t K_{t-s} * p_s ds ||_r from the weighted norm sup_s s^(1-d/2r) ||p_s||_r."""
    if not r > d / 2:
        raise DomainError(f"r must be > d/2={d / 2}, got {r}")
    decay = 0.5 - d / (2 * r)
    return c1(d, 1, convention) * weighted_norm * beta(1 - d / (2 * r), 0.5) / t**decay
