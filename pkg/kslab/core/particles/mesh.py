"""Cloud-in-cell assignment between particles and a periodic grid."""
import itertools

import numpy as np

from ..models.grid import GridSpec

__all__ = ["cic_deposit", "cic_gather", "cic_window"]


def _corners(positions: np.ndarray, grid: GridSpec):
    """Yield (flat cell index, weight) for each of the 2^d cells around every particle."""
    scaled = (positions + grid.box_length / 2) / grid.spacing
    base = np.floor(scaled).astype(np.int64)
    frac = scaled - base
    strides = grid.n ** np.arange(grid.d - 1, -1, -1)
    for corner in itertools.product((0, 1), repeat=grid.d):
        corner = np.array(corner)
        index = np.mod(base + corner, grid.n) @ strides
        weight = np.prod(np.where(corner == 1, frac, 1 - frac), axis=1)
        yield index, weight


def cic_deposit(positions: np.ndarray, grid: GridSpec, weights=None):
    """Assigned counts on the grid, shape (n,)*d; particles wrap around the torus."""
    total = np.zeros(grid.n**grid.d)
    for index, weight in _corners(positions, grid):
        if weights is not None:
            weight = weight * weights
        total += np.bincount(index, weights=weight, minlength=total.size)
    return total.reshape(grid.shape)


def cic_gather(values: np.ndarray, positions: np.ndarray, grid: GridSpec):
    """Interpolate grid values (..., n, ..., n) back to the particles, shape (N, ...)."""
    flat = values.reshape(values.shape[: values.ndim - grid.d] + (-1,))
    result = 0.0
    for index, weight in _corners(positions, grid):
        result = result + np.moveaxis(flat[..., index], -1, 0) * (
            weight.reshape((-1,) + (1,) * (flat.ndim - 1))
        )
    return result


def cic_window(k_axes, spacing: float):
    """Fourier transform of the cloud-in-cell assignment function, prod sinc^2(k h / 2)."""
    window = 1.0
    for k in k_axes:
        window = window * np.sinc(k * spacing / (2 * np.pi)) ** 2
    return window
