"""Fourier-space operators on the periodic grid."""
import math

import numpy as np
from scipy import fft

from ..models.grid import GridField, GridSpec

__all__ = ["Spectral", "phi1", "phi2"]

PHI2_SERIES_BELOW = 1e-3


def phi1(z):
    """(e^z - 1) / z, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=float)
    safe = np.where(z == 0, 1.0, z)
    return np.where(z == 0, 1.0, np.expm1(z) / safe)


def phi2(z):
    """(e^z - 1 - z) / z^2, equal to 1/2 at z = 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < PHI2_SERIES_BELOW
    safe = np.where(small, 1.0, z)
    direct = (np.expm1(safe) - safe) / safe**2
    series = 0.5 + z / 6 + z**2 / 24
    return np.where(small, series, direct)


class Spectral:
    """Real FFTs, derivatives and heat multipliers for one grid."""

    def __init__(self, grid: GridSpec, workers: int = 1):
        self.grid = grid
        self.workers = workers
        axes = []
        for axis in range(grid.d):
            if axis == grid.d - 1:
                freq = fft.rfftfreq(grid.n, d=grid.spacing)
            else:
                freq = fft.fftfreq(grid.n, d=grid.spacing)
            shape = [1] * grid.d
            shape[axis] = freq.size
            axes.append((2 * math.pi * freq).reshape(shape))
        self.k = axes
        self.k_squared = sum(k**2 for k in axes)
        # Odd derivatives drop the unpaired Nyquist mode of even grids.
        nyquist = math.pi / grid.spacing
        self.k_derivative = [np.where(np.isclose(np.abs(k), nyquist), 0.0, k) for k in axes]
        self.axes = tuple(range(-grid.d, 0))

    def forward(self, values: np.ndarray):
        return fft.rfftn(values, axes=self.axes, workers=self.workers)

    def inverse(self, values_hat: np.ndarray):
        return fft.irfftn(values_hat, s=self.grid.shape, axes=self.axes, workers=self.workers)

    def gradient(self, values_hat: np.ndarray):
        """Real gradient (d, n, ..., n) of a transformed scalar."""
        return np.stack([self.inverse(1j * k * values_hat) for k in self.k_derivative])

    def divergence_hat(self, vector: np.ndarray):
        """Transform of the divergence of a real vector field (d, n, ..., n)."""
        return sum(
            1j * k * self.forward(component) for k, component in zip(self.k_derivative, vector)
        )

    def heat(self, t: float, rate: float = 0.0):
        """Multiplier of e^(t Delta / 2 - rate t)."""
        return np.exp(-(self.k_squared / 2 + rate) * t)

    def heat_flow(self, f: GridField, t: float) -> GridField:
        """g_t * f on the torus."""
        return GridField(self.grid, self.inverse(self.heat(t) * self.forward(f.values)))
