"""Drift of the particle system: linear part plus memory of all past slices."""
from concurrent.futures import ThreadPoolExecutor
import logging
import math

import numpy as np

from ..bounds import ModelParams
from ..errors import DomainError
from ..fields import GaussianMixture, kernel_k, linear_drift_b0, regularization_factor
from ..models.backend import DriftBackendConfig, DriftMode
from ..models.grid import GridSpec
from ..pde.spectral import Spectral
from .ensemble import ParticleEnsemble
from .mesh import cic_deposit, cic_gather, cic_window

logger = logging.getLogger(__name__)

__all__ = ["slice_weights", "linear_drift", "drift_eval"]

# Upper bound on particle pairs materialized at once by the pairwise backend.
PAIRWISE_ELEMENTS = 2**21


def slice_weights(times, t: float, cfg: DriftBackendConfig):
    """Trapezoidal weights of the retained slices for an integral over [0, t].

    With epsilon > 0 the node s = t is added; the regularized kernel vanishes
    there. With a memory cutoff the integral stops at t - delta.
    """
    times = np.asarray(times, dtype=float)
    if not len(times) or times[0] != 0:
        raise DomainError("slice history must start at t = 0")
    weights = np.zeros(len(times))
    if cfg.epsilon > 0:
        keep = times < t
        nodes = np.append(times[keep], t)
    else:
        keep = t - times >= cfg.delta
        nodes = times[keep]
    if len(nodes) < 2:
        return weights
    gaps = np.diff(nodes)
    node_weights = np.zeros(len(nodes))
    node_weights[:-1] += gaps / 2
    node_weights[1:] += gaps / 2
    if cfg.epsilon > 0:
        node_weights = node_weights[:-1]
    weights[keep] = node_weights
    return weights


def linear_drift(positions, t: float, params: ModelParams, cfg, m_c0: GaussianMixture):
    """b0^eps at the particles, without chi."""
    if t > 0:
        return linear_drift_b0(m_c0, t, positions, params.lam, cfg.epsilon)
    if cfg.epsilon > 0:
        return np.zeros_like(positions)
    return m_c0.gradient(positions)


def _pairwise(positions, slices, lam, eps, cfg: DriftBackendConfig):
    count = slices[0][2].shape[0]
    rows = max(1, min(cfg.chunk_size, PAIRWISE_ELEMENTS // count))

    def chunk(start):
        x = positions[start : start + rows]
        total = np.zeros(x.shape)
        for lag, weight, past, _time in slices:
            pull = kernel_k(lag, x[:, np.newaxis, :] - past[np.newaxis, :, :], lam, eps)
            total += weight * pull.sum(axis=1)
        return total

    starts = range(0, positions.shape[0], rows)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            parts = list(executor.map(chunk, starts))
    else:
        parts = [chunk(start) for start in starts]
    return np.concatenate(parts) / count


def _mesh_spectral(ens: ParticleEnsemble, grid: GridSpec, workers: int):
    key = ("spectral", grid)
    if key not in ens.mesh_cache:
        spectral = Spectral(grid, workers)
        ens.mesh_cache[key] = (spectral, cic_window(spectral.k, grid.spacing))
    return ens.mesh_cache[key]


def _slice_density_hat(ens, spectral, window, time, past):
    """Deconvolved transform of one slice's empirical density, cached per slice."""
    key = ("slice", spectral.grid, time)
    if key not in ens.mesh_cache:
        grid = spectral.grid
        density = cic_deposit(past, grid) / (past.shape[0] * grid.cell_volume)
        ens.mesh_cache[key] = spectral.forward(density) / window
    return ens.mesh_cache[key]


def _prune_mesh_cache(ens: ParticleEnsemble):
    alive = set(ens.history.times)
    for key in [k for k in ens.mesh_cache if k[0] == "slice" and k[2] not in alive]:
        del ens.mesh_cache[key]


def _mesh(ens, positions, slices, lam, eps, cfg: DriftBackendConfig):
    grid = cfg.mesh
    spectral, window = _mesh_spectral(ens, grid, cfg.workers)
    _prune_mesh_cache(ens)
    total = np.zeros((grid.d,) + spectral.k_squared.shape, dtype=complex)
    for lag, weight, past, time in slices:
        density_hat = _slice_density_hat(ens, spectral, window, time, past)
        damping = float(regularization_factor(lag, eps, grid.d / 2 + 1))
        scale = weight * math.exp(-lam * lag) * damping
        smoothed = scale * np.exp(-lag * spectral.k_squared / 2) * density_hat
        for axis, k in enumerate(spectral.k_derivative):
            total[axis] += 1j * k * smoothed
    field = np.stack([spectral.inverse(component / window) for component in total])
    return cic_gather(field, positions, grid)


def drift_eval(
    ens: ParticleEnsemble,
    t: float,
    params: ModelParams,
    cfg: DriftBackendConfig,
    m_c0: GaussianMixture,
) -> np.ndarray:
    """Drift of every particle at time t, shape (N, d).

    chi b0^eps(t, X^i) + chi/N sum_l w_l sum_j K^eps_(t - s_l)(X^i_t - X^j_(s_l)).
    """
    positions = ens.positions
    chi = params.chi
    linear_scale = chi if cfg.include_chi_on_b0 else 1.0
    drift = linear_scale * linear_drift(positions, t, params, cfg, m_c0)
    if chi == 0:
        return drift
    weights = slice_weights(ens.history.times, t, cfg)
    slices = [
        (t - time, weight, past, time)
        for time, weight, past in zip(ens.history.times, weights, ens.history.positions)
        if weight != 0
    ]
    if not slices:
        return drift
    if cfg.mode is DriftMode.mesh:
        memory = _mesh(ens, positions, slices, params.lam, cfg.epsilon, cfg)
    else:
        memory = _pairwise(positions, slices, params.lam, cfg.epsilon, cfg)
    return drift + chi * memory
