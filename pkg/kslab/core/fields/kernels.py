"""Heat kernel, the interaction kernel K and their regularizations."""
import math

from attrs import define, field
import numpy as np

from ..errors import DomainError
from ..special import C1Convention, c1

__all__ = [
    "KernelEval",
    "heat_kernel",
    "kernel_k",
    "kernel_K",
    "kernel_regularization_gap",
    "regularization_factor",
]


def _positive_time(instance, attribute, value):
    if not value > 0:
        raise DomainError(f"{attribute.name} must be > 0, got {value}")


@define(frozen=True)
class KernelEval:
    """Point of evaluation of K_t(x) or its regularization K^eps_t(x)."""

    t: float = field(validator=_positive_time)
    x: tuple = field(converter=lambda x: tuple(float(v) for v in np.ravel(x)))
    lam: float = 0.0
    epsilon: float = 0.0


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("kernel time must be > 0")
    return t


def regularization_factor(t, eps: float, power: float):
    """(t / (t + eps))^power; 1 when eps is 0."""
    if eps == 0:
        return np.ones_like(np.asarray(t, dtype=float))
    return (np.asarray(t, dtype=float) / (t + eps)) ** power


def heat_kernel(t, x, eps: float = 0.0):
    """g^eps_t(x) = exp(-|x|^2 / 2t) / (2 pi (t + eps))^(d/2) over trailing axis of x."""
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    sq = np.einsum("...i,...i->...", x, x)
    return np.exp(-sq / (2 * t)) / (2 * math.pi * (t + eps)) ** (d / 2)


def kernel_k(t, x, lam: float = 0.0, eps: float = 0.0):
    """K^eps_t(x) = -x exp(-|x|^2/2t - lam t) / ((2 pi)^(d/2) (t + eps)^(d/2 + 1)).

    ``x`` has the dimension on its trailing axis; ``t`` broadcasts against the rest.
    """
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    sq = np.einsum("...i,...i->...", x, x)
    denominator = (2 * math.pi) ** (d / 2) * (t + eps) ** (d / 2 + 1)
    scalar = np.exp(-sq / (2 * t) - lam * t) / denominator
    return -x * scalar[..., np.newaxis]


def kernel_K(e: KernelEval):
    return kernel_k(e.t, np.array(e.x), e.lam, e.epsilon)


def kernel_regularization_gap(
    d: int,
    r: float,
    t: float,
    eps: float,
    lam: float = 0.0,
    convention: C1Convention = C1Convention.exact,
):
    """||K^eps_{t,i} - K_{t,i}||_r, exact since K^eps is a scalar multiple of K."""
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    spatial = d / 2 if math.isinf(r) else (d / 2) * (1 - 1 / r)
    full = math.exp(-lam * t) * c1(d, r, convention) / t ** (spatial + 0.5)
    return float((1 - regularization_factor(t, eps, d / 2 + 1)) * full)
