"""Euler-Maruyama step of the regularized particle system."""
import logging
import math

import numpy as np

from ..bounds import ModelParams
from ..errors import DomainError, NonFiniteParticleError
from ..fields import GaussianMixture
from ..models.backend import DriftBackendConfig
from .drift import drift_eval
from .ensemble import ParticleEnsemble

logger = logging.getLogger(__name__)

__all__ = ["advance"]


def advance(
    ens: ParticleEnsemble,
    params: ModelParams,
    cfg: DriftBackendConfig,
    dt: float,
    m_c0: GaussianMixture,
) -> ParticleEnsemble:
    """X <- X + drift dt + sqrt(dt) xi, then record the new slice."""
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    drift = drift_eval(ens, ens.t, params, cfg, m_c0)
    moved = ens.positions + drift * dt + math.sqrt(dt) * ens.streams.next_normals()
    finite = np.all(np.isfinite(moved), axis=1)
    if not finite.all():
        index = int(np.flatnonzero(~finite)[0])
        raise NonFiniteParticleError(index, ens.t, float(np.linalg.norm(drift[index])))
    ens.positions = moved
    ens.last_drift = drift
    ens.step_count += 1
    ens.t = ens.step_count * dt
    ens.history.append(ens.t, moved)
    return ens
