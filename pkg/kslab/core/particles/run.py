"""Run the particle system from a RunConfig."""
import logging
import math
from typing import Dict, List, Optional

from attrs import define, field
import numpy as np

from ..bounds import ModelParams
from ..density import NormSeries, lq_norm_grid
from ..models.backend import DriftBackendConfig
from ..models.config import RunConfig
from ..models.grid import GridField
from .dynamics import advance
from .ensemble import ParticleEnsemble, sample_initial
from .kde import empirical_density, silverman_bandwidth

logger = logging.getLogger(__name__)

__all__ = ["ParticleRun", "DIAGNOSTIC_COLUMNS", "simulate", "kde_of"]

DIAGNOSTIC_COLUMNS = ("t", "max_drift", "sqrt_t_max_drift_component")


@define
class ParticleRun:
    """Final ensemble, per-step drift diagnostics and KDE snapshots of a particle run."""

    config: RunConfig
    params: ModelParams
    backend: DriftBackendConfig
    ensemble: ParticleEnsemble
    initial_positions: np.ndarray = field(eq=False, repr=False)
    diagnostics: List[tuple] = field(factory=list)
    densities: Dict[float, GridField] = field(factory=dict, repr=False)

    @property
    def config_hash(self):
        return self.config.config_hash

    def diagnostics_array(self):
        return np.array(self.diagnostics, dtype=float).reshape(-1, len(DIAGNOSTIC_COLUMNS))

    def max_scaled_drift(self):
        """sup over steps of sqrt(t) max_i max_axis |b_i(t)|."""
        rows = self.diagnostics_array()
        return float(rows[:, 2].max()) if len(rows) else 0.0

    def final_density(self) -> GridField:
        return self.densities[max(self.densities)]

    def kde_series(self, r: float, weight_exponent: float = 0.0) -> NormSeries:
        times = sorted(t for t in self.densities if t > 0 or weight_exponent == 0)
        norms = [lq_norm_grid(self.densities[t], r) for t in times]
        return NormSeries(times, norms, r, weight_exponent)

    def manifest(self):
        return {
            "config_hash": self.config_hash,
            "N": self.ensemble.N,
            "streams": self.ensemble.manifest(),
            "backend": self.backend.to_dict(),
        }


def kde_of(positions: np.ndarray, config: RunConfig, workers: int = 1) -> GridField:
    bandwidth = silverman_bandwidth(positions, config.particles.bandwidth_factor)
    return empirical_density(positions, bandwidth, config.kde_grid_spec(), workers)


def simulate(
    config: RunConfig,
    params: Optional[ModelParams] = None,
    epsilon: Optional[float] = None,
    N: Optional[int] = None,
    kde_every: Optional[int] = None,
) -> ParticleRun:
    """Euler-Maruyama from i.i.d. initial draws up to T.

    KDEs are kept at 0, at T and every ``kde_every`` steps.
    """
    params = params or config.params()
    section = config.particles
    backend = config.backend(epsilon)
    workers = config.workers()
    ensemble = sample_initial(
        config.rho0,
        N or section.N,
        config.run.seed,
        block=section.rng_block,
        window=section.thin_window,
        max_slices=section.max_slices,
    )
    run = ParticleRun(config, params, backend, ensemble, ensemble.positions.copy())
    run.densities[0.0] = kde_of(ensemble.positions, config, workers)
    steps = int(round(params.T / section.dt))
    logger.info(
        "simulating N=%d for %d steps with %s backend (hash %s)",
        ensemble.N,
        steps,
        backend.mode.name,
        config.config_hash,
    )
    for count in range(steps):
        t = ensemble.t
        advance(ensemble, params, backend, section.dt, config.c0)
        drift = ensemble.last_drift
        run.diagnostics.append(
            (
                t,
                float(np.linalg.norm(drift, axis=1).max()),
                math.sqrt(t) * float(np.abs(drift).max()),
            )
        )
        if kde_every and (count + 1) % kde_every == 0 and count + 1 < steps:
            run.densities[ensemble.t] = kde_of(ensemble.positions, config, workers)
    run.densities[ensemble.t] = kde_of(ensemble.positions, config, workers)
    return run
