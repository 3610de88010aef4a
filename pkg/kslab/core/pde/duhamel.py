"""Duhamel representations evaluated from retained snapshots."""
import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from ..density import lq_norm_grid
from ..errors import InsufficientHistoryError
from ..fields import GaussianMixture, heat_convolve_mixture
from ..models.grid import GridField
from .history import History
from .solver import SolverState, nonlinear_terms
from .spectral import Spectral, phi1, phi2

logger = logging.getLogger(__name__)

__all__ = ["exponential_trapezoid", "duhamel_c", "mild_residual"]


def exponential_trapezoid(
    times: Sequence[float],
    sample: Callable[[int], np.ndarray],
    rate: np.ndarray,
    t: float,
    indices: Optional[Sequence[int]] = None,
):
    """Integral over [times[0], t] of e^(-rate (t - u)) f(u) du per Fourier mode.

    f is linear between the samples ``sample(i)``; the exponential is integrated
    exactly, so the lag-zero end needs no special treatment.
    """
    if indices is None:
        indices = range(len(times))
    indices = list(indices)
    total = None
    previous = sample(indices[0])
    for left, right in zip(indices, indices[1:]):
        current = sample(right)
        width = times[right] - times[left]
        z = -rate * width
        second = phi2(z)
        piece = np.exp(-rate * (t - times[right])) * width * (
            previous * (phi1(z) - second) + current * second
        )
        total = piece if total is None else total + piece
        previous = current
    return total


def _coarse_indices(count: int):
    indices = list(range(0, count, 2))
    if indices[-1] != count - 1:
        indices.append(count - 1)
    return indices


def _covering_snapshots(history: History, t: float):
    snapshots = history.up_to(t)
    if len(snapshots) < 2 or snapshots[0].t != 0:
        raise InsufficientHistoryError("history does not start at t = 0")
    if not math.isclose(snapshots[-1].t, t, rel_tol=1e-9, abs_tol=1e-12):
        raise InsufficientHistoryError(f"history ends at {snapshots[-1].t}, not at t = {t}")
    return snapshots


def _check_quadrature(spectral, fine, coarse, scale, tolerance):
    if tolerance is None or coarse is None:
        return
    estimate = float(np.abs(spectral.inverse(fine - coarse)).max()) / 3 / scale
    logger.debug("history quadrature error estimate %.2e", estimate)
    if estimate > tolerance:
        raise InsufficientHistoryError(
            f"snapshot spacing too coarse: estimated quadrature error {estimate:.2e}"
            f" > {tolerance:.2e}"
        )


def duhamel_c(
    history: History,
    c0: GaussianMixture,
    t: float,
    lam: float,
    tolerance: Optional[float] = None,
    spectral: Optional[Spectral] = None,
) -> GridField:
    """c(t) = e^(-lam t) g_t * c0 + integral of e^(-lam s) g_s * rho_(t-s) ds."""
    grid = history.grid
    spectral = spectral or Spectral(grid)
    snapshots = _covering_snapshots(history, t)
    times = [snap.t for snap in snapshots]
    rate = spectral.k_squared / 2 + lam

    def sample(index):
        return spectral.forward(snapshots[index].rho)

    integral = exponential_trapezoid(times, sample, rate, t)
    initial = math.exp(-lam * t) * grid.sample(heat_convolve_mixture(c0, t).evaluate).values
    c_hat = spectral.forward(initial) + integral
    values = spectral.inverse(c_hat)
    if len(times) >= 3:
        coarse = exponential_trapezoid(times, sample, rate, t, _coarse_indices(len(times)))
        scale = max(float(np.abs(values).max()), math.ulp(1.0))
        _check_quadrature(spectral, integral, coarse, scale, tolerance)
    return GridField(grid, values)


def mild_residual(
    state: SolverState, history: History, tolerance: Optional[float] = None
) -> float:
    """Relative L^2 gap between the stored rho(t) and its mild representation:

    g_t * rho0 - chi sum_i int_0^t d_i g_(t-s) * (rho_s d_i c_s) ds.
    """
    spectral = state.spectral
    snapshots = _covering_snapshots(history, state.t)
    times = [snap.t for snap in snapshots]
    rate = spectral.k_squared / 2

    def sample(index):
        snap = snapshots[index]
        n_rho, _ = nonlinear_terms(
            state, spectral.forward(snap.rho), spectral.forward(snap.c)
        )
        return n_rho

    rho0_hat = spectral.forward(snapshots[0].rho)
    integral = exponential_trapezoid(times, sample, rate, state.t)
    rhs = spectral.inverse(spectral.heat(state.t) * rho0_hat + integral)
    if len(times) >= 3 and state.params.chi > 0:
        coarse = exponential_trapezoid(times, sample, rate, state.t, _coarse_indices(len(times)))
        scale = max(float(np.abs(rhs).max()), math.ulp(1.0))
        _check_quadrature(spectral, integral, coarse, scale, tolerance)
    gap = GridField(state.grid, rhs - state.rho.values)
    return lq_norm_grid(gap, 2) / lq_norm_grid(state.rho, 2)
