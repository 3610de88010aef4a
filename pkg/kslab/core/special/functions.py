"""Gaussian L^r norm constants and beta integrals."""
from enum import Enum
import math
import warnings

from attrs import define, field
from scipy import integrate, optimize, special

from ..errors import DomainError, QuadratureError

__all__ = [
    "SUP",
    "C1Convention",
    "GaussNormQuery",
    "BetaQuery",
    "c0",
    "c1",
    "c1_exact",
    "c1_printed",
    "gaussian_lr_norm",
    "grad_gaussian_lr_norm",
    "gaussian_lr_norm_quadrature",
    "grad_gaussian_lr_norm_quadrature",
    "beta_integral",
    "beta",
    "beta_eps",
    "beta_identity_check",
]

SUP = math.inf
QUAD_EPSREL = 1e-11


class C1Convention(Enum):
    """Which closed form supplies the gradient constant C1(r)."""

    exact = 1
    printed = 2


def _check_exponent(instance, attribute, value):
    if not value >= 1:
        raise DomainError(f"{attribute.name} must be >= 1, got {value}")


def _check_positive_time(instance, attribute, value):
    if not value > 0:
        raise DomainError(f"{attribute.name} must be > 0, got {value}")


def _check_dimension(instance, attribute, value):
    if int(value) != value or value < 1:
        raise DomainError(f"{attribute.name} must be an integer >= 1, got {value}")


def _check_below_one(instance, attribute, value):
    if not value < 1:
        raise DomainError(f"{attribute.name} must be < 1, got {value}")


@define(frozen=True)
class GaussNormQuery:
    """Dimension, Lebesgue exponent and time of a heat kernel norm.

    ``r = SUP`` (``math.inf``) selects the sup norm, which has its own formulas.
    """

    d: int = field(validator=_check_dimension)
    r: float = field(validator=_check_exponent)
    t: float = field(default=1.0, validator=_check_positive_time)

    @property
    def is_sup(self):
        return math.isinf(self.r)


@define(frozen=True)
class BetaQuery:
    """Exponents of the beta integral of u^-a (1-u)^-b over [0, 1]."""

    a: float = field(validator=_check_below_one)
    b: float = field(validator=_check_below_one)


def _quad(func, lower, upper, **kwargs):
    """Adaptive Gauss-Kronrod quadrature that raises instead of warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _abserr = integrate.quad(
                func, lower, upper, epsabs=0.0, epsrel=QUAD_EPSREL, limit=200, **kwargs
            )
        except integrate.IntegrationWarning as err:
            raise QuadratureError(str(err)) from err
    if not math.isfinite(value):
        raise QuadratureError(f"quadrature over [{lower}, {upper}] is not finite")
    return value


def c0(d: int, r: float):
    """C0(r) = ||g_1||_r = (2 pi)^(-(d/2)(1-1/r)) r^(-d/(2r)), the heat kernel norm at unit time.

    The factor r^(-d/(2r)) is often dropped; without it the value only bounds the norm.
    """
    if math.isinf(r):
        return (2 * math.pi) ** (-d / 2)
    return (2 * math.pi) ** (-(d / 2) * (1 - 1 / r)) * r ** (-d / (2 * r))


def c1_exact(d: int, r: float):
    """||d_i g_1||_r obtained by factorizing the derivative across coordinates."""
    if math.isinf(r):
        return math.exp(-0.5) * (2 * math.pi) ** (-d / 2)
    log_power = (
        -(d * r / 2) * math.log(2 * math.pi)
        + ((d - 1) / 2) * math.log(2 * math.pi / r)
        + ((r + 1) / 2) * math.log(2 / r)
        + math.lgamma((r + 1) / 2)
    )
    return math.exp(log_power / r)


def c1_printed(d: int, r: float):
    """The alternative closed form for C1(r); ``c1_exact`` is larger by 2 r^(-(d-1)/(2r)).

    Kept so derived constants can be reported under both conventions.
    """
    if math.isinf(r):
        # Limit of the finite-r expression as r grows.
        return math.exp(-0.5) * 2 ** (-d / 2 - 1) * math.pi ** (-d / 2)
    spatial = (d / 2) * (1 - 1 / r)
    denominator = (
        2 ** (spatial + 0.5) * math.pi ** (spatial + 1 / (2 * r)) * r ** (0.5 + 1 / (2 * r))
    )
    return math.exp(math.lgamma((r + 1) / 2) / r) / denominator


def c1(d: int, r: float, convention: C1Convention = C1Convention.exact):
    if convention is C1Convention.printed:
        return c1_printed(d, r)
    return c1_exact(d, r)


def gaussian_lr_norm(query: GaussNormQuery):
    """||g_t||_r = C0(r) / t^((d/2)(1-1/r))."""
    d, r, t = query.d, query.r, query.t
    if query.is_sup:
        return (2 * math.pi * t) ** (-d / 2)
    return c0(d, r) / t ** ((d / 2) * (1 - 1 / r))


def grad_gaussian_lr_norm(
    query: GaussNormQuery, convention: C1Convention = C1Convention.exact
):
    """||d_i g_t||_r = C1(r) / t^((d/2)(1-1/r) + 1/2)."""
    d, r, t = query.d, query.r, query.t
    spatial = d / 2 if query.is_sup else (d / 2) * (1 - 1 / r)
    return c1(d, r, convention) / t ** (spatial + 0.5)


def gaussian_lr_norm_quadrature(query: GaussNormQuery):
    """Quadrature oracle for ``gaussian_lr_norm`` via radial reduction."""
    d, r, t = query.d, query.r, query.t
    if query.is_sup:
        # Radial profile in the unit variable u = |x| / sqrt(t).
        found = optimize.minimize_scalar(
            lambda u: -math.exp(-u * u / 2),
            bounds=(0.0, 8.0),
            method="bounded",
            options={"xatol": 1e-10},
        )
        return (2 * math.pi * t) ** (-d / 2) * -found.fun
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    radial = _quad(lambda u: u ** (d - 1) * math.exp(-r * u * u / 2), 0.0, math.inf)
    power = (2 * math.pi * t) ** (-d * r / 2) * t ** (d / 2) * sphere * radial
    return power ** (1 / r)


def grad_gaussian_lr_norm_quadrature(query: GaussNormQuery):
    """Quadrature oracle for ``grad_gaussian_lr_norm``.

    The derivative along one axis times the transverse Gaussian factors.
    """
    d, r, t = query.d, query.r, query.t
    if query.is_sup:
        found = optimize.minimize_scalar(
            lambda u: -u * math.exp(-u * u / 2),
            bounds=(0.0, 8.0),
            method="bounded",
            options={"xatol": 1e-10},
        )
        return -found.fun * (2 * math.pi * t) ** (-d / 2) / math.sqrt(t)
    along = 2 * _quad(lambda u: u**r * math.exp(-r * u * u / 2), 0.0, math.inf)
    across = 2 * _quad(lambda u: math.exp(-r * u * u / 2), 0.0, math.inf)
    # x = sqrt(t) u: each axis contributes sqrt(t) (2 pi t)^(-r/2), the derivative t^(-r/2).
    scale = (math.sqrt(t) * (2 * math.pi * t) ** (-r / 2)) ** d * t ** (-r / 2)
    return (scale * along * across ** (d - 1)) ** (1 / r)


def beta_integral(query: BetaQuery):
    """Integral of u^-a (1-u)^-b over [0, 1] = G(1-a) G(1-b) / G(2-a-b)."""
    return float(special.beta(1 - query.a, 1 - query.b))


def beta(a: float, b: float):
    """Shorthand for ``beta_integral(BetaQuery(a, b))``."""
    return beta_integral(BetaQuery(a, b))


def beta_eps(eps: float):
    """Sup of beta(a, b) over a, b <= 1 - eps; beta increases in both arguments."""
    if not 0 < eps <= 1:
        raise DomainError(f"eps must be in (0, 1], got {eps}")
    return beta(1 - eps, 1 - eps)


def beta_identity_check(a: float, b: float, t: float):
    """Return (quadrature, closed form) of the integral of s^-a (t-s)^-b over [0, t].

    The endpoint singularities are absorbed in QUADPACK's algebraic weight.
    """
    query = BetaQuery(a, b)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    lhs = _quad(lambda s: 1.0, 0.0, t, weight="alg", wvar=(-a, -b))
    rhs = t ** (1 - (a + b)) * beta_integral(query)
    return lhs, rhs
