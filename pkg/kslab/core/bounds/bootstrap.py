"""Bootstrap recursion bounding ||rho_t||_{d/2}."""
import logging
import math

from attrs import define
import numpy as np

from ..constants import BOOTSTRAP_CAP, REAL_ROOT_TOL
from ..errors import DomainError
from ..special import beta_eps
from .constants import ModelParams

logger = logging.getLogger(__name__)

__all__ = [
    "BootstrapSequence",
    "bootstrap_bound_sequence",
    "bootstrap_exponents",
    "initial_bootstrap_constant",
]


@define(frozen=True)
class BootstrapSequence:
    """Iterates A_n, A'_n of the recursion with its fixed points.

    ``A[0]`` is the starting value; ``A_prime[0]`` is undefined (nan).
    """

    A: np.ndarray
    A_prime: np.ndarray
    a_prime: np.ndarray
    a: np.ndarray
    fixed_points: tuple
    diverged: bool

    @property
    def y(self):
        """Largest fixed point of the iteration map."""
        return max(self.fixed_points) if self.fixed_points else math.nan

    @property
    def bound(self):
        """Upper bound max(A_1, y) on every iterate past the first."""
        return max(self.A[1], self.y) if self.fixed_points else self.A[1]

    @property
    def density_bound(self):
        """Limit of A'_n, the bound on sup_t ||rho_t||_{d/2}."""
        return float(self.A_prime[np.isfinite(self.A_prime)][-1])

    def is_bounded(self, rtol: float = 1e-12):
        return bool(np.all(self.A[1:] <= self.bound * (1 + rtol)))


def bootstrap_exponents(d: int, n_max: int):
    """Decay exponents a'_n and a_n for n = 1..n_max."""
    a0 = (2 / 3) * (1 - 1 / d) / (1 - 2 / (3 * d))
    n = np.arange(1, n_max + 1, dtype=float)
    a_prime = (2 * a0 - 1) / 2 ** (n - 1)
    a = (2 * a0 - 1) / 2 ** (n + 1) + 0.5
    return a_prime, a


def initial_bootstrap_constant(C_q: float, d: int, q: float):
    """Starting constant A0 from interpolating ||rho||_r between L^1 and L^q."""

    def theta(r):
        return (1 - 1 / r) / (1 - 1 / q)

    return max(C_q ** theta(d / 2), C_q ** theta(d))


def _fixed_points(coefficients, C_q: float):
    """Positive real roots of x^4 = C_q^3 (c + b x + a x^2)."""
    constant, linear, quadratic = coefficients
    scale = C_q**3
    roots = np.roots([1.0, 0.0, -scale * quadratic, -scale * linear, -scale * constant])
    real = [
        float(root.real)
        for root in roots
        if abs(root.imag) <= REAL_ROOT_TOL * max(1.0, abs(root)) and root.real > 0
    ]
    return tuple(sorted(real))


def bootstrap_bound_sequence(
    params: ModelParams,
    C_q: float,
    A0: float,
    n_max: int = 200,
    cap: float = BOOTSTRAP_CAP,
) -> BootstrapSequence:
    """Iterate A'_{n+1} = ||p0|| + d chi ||grad c0|| b A_n + d chi b^2 A_n^2,
    A_{n+1} = A'_{n+1}^(1/4) C_q^(3/4), with b the sup of beta(a, b) over a, b <= 5/6.
    """
    d = params.d
    if not math.isclose(params.q, 1.5 * d):
        raise DomainError(f"the recursion needs q = 3d/2 = {1.5 * d}, got {params.q}")
    if not A0 > 0:
        raise DomainError(f"A0 must be > 0, got {A0}")
    beta_sixth = beta_eps(1 / 6)
    coefficients = (
        params.norm_p0_dhalf,
        d * params.chi * params.norm_grad_c0_d * beta_sixth,
        d * params.chi * beta_sixth**2,
    )
    A = np.full(n_max + 1, math.nan)
    A_prime = np.full(n_max + 1, math.nan)
    A[0] = A0
    diverged = False
    for n in range(n_max):
        A_prime[n + 1] = np.polynomial.polynomial.polyval(A[n], coefficients)
        A[n + 1] = A_prime[n + 1] ** 0.25 * C_q**0.75
        if not A[n + 1] <= cap:
            logger.warning("bootstrap sequence exceeded %g at n=%d", cap, n + 1)
            diverged = True
            break
    a_prime, a = bootstrap_exponents(d, n_max)
    return BootstrapSequence(
        A=A,
        A_prime=A_prime,
        a_prime=a_prime,
        a=a,
        fixed_points=_fixed_points(coefficients, C_q),
        diverged=diverged,
    )
