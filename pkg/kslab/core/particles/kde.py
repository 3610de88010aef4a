"""Gaussian kernel density estimate of an ensemble on the torus."""
import logging
import warnings

import numpy as np

from ..constants import DEFAULT_BANDWIDTH_FACTOR
from ..errors import BandwidthWarning, DomainError
from ..models.grid import GridField, GridSpec
from ..pde.spectral import Spectral
from .mesh import cic_deposit, cic_window

logger = logging.getLogger(__name__)

__all__ = ["silverman_bandwidth", "empirical_density"]

MIN_NEIGHBOURS = 5


def silverman_bandwidth(positions: np.ndarray, factor: float = DEFAULT_BANDWIDTH_FACTOR):
    """factor * sigma * N^(-1/(d+4)), sigma the mean per-axis standard deviation."""
    count, d = positions.shape
    if count < 2:
        raise DomainError("bandwidth rule needs at least two particles")
    sigma = float(np.mean(np.std(positions, axis=0, ddof=1)))
    return factor * sigma * count ** (-1 / (d + 4))


def _neighbours_of_peak(positions, density: GridField, bandwidth: float):
    grid = density.grid
    peak = np.unravel_index(np.argmax(density.values), grid.shape)
    centre = grid.axis()[list(peak)]
    offset = positions - centre
    offset -= grid.box_length * np.round(offset / grid.box_length)
    return int(np.sum(np.sum(offset**2, axis=1) < bandwidth**2))


def empirical_density(
    positions, bandwidth: float, grid: GridSpec, workers: int = 1
) -> GridField:
    """(1/N) sum_j g_(h^2)(x - X^j), deposited by cloud-in-cell and smoothed spectrally."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    positions = np.asarray(getattr(positions, "positions", positions), dtype=float)
    spectral = Spectral(grid, workers)
    counts = cic_deposit(positions, grid) / (positions.shape[0] * grid.cell_volume)
    window = cic_window(spectral.k, grid.spacing)
    smoothed = spectral.heat(bandwidth**2) * spectral.forward(counts) / window
    density = GridField(grid, spectral.inverse(smoothed))
    # The zero mode carries the mass; pin it to one against round-off.
    density.values /= density.mass()
    if _neighbours_of_peak(positions, density, bandwidth) < MIN_NEIGHBOURS:
        warnings.warn(
            f"fewer than {MIN_NEIGHBOURS} particles within bandwidth {bandwidth:.3g} of the peak",
            BandwidthWarning,
            stacklevel=2,
        )
    return density
