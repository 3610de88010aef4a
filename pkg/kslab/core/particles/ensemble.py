"""Particle ensembles with the retained time slices of their past."""
import logging
from typing import List, Optional, Sequence

from attrs import define, field
import numpy as np

from ..constants import DEFAULT_RNG_BLOCK
from ..errors import DomainError
from ..fields import GaussianMixture
from .streams import ParticleStreams

logger = logging.getLogger(__name__)

__all__ = ["SliceHistory", "ParticleEnsemble", "sample_initial"]


@define
class SliceHistory:
    """Past positions at strictly increasing times.

    Slices inside the window [t - window, t] are always kept; older ones are
    thinned by halves whenever more than ``max_slices`` are held.
    """

    times: List[float] = field(factory=list)
    positions: List[np.ndarray] = field(factory=list)
    window: Optional[float] = None
    max_slices: Optional[int] = None

    def append(self, t: float, positions: np.ndarray):
        if self.times and not t > self.times[-1]:
            raise DomainError(f"slice time {t} does not increase")
        self.times.append(float(t))
        self.positions.append(np.array(positions, dtype=float))
        if self.max_slices and len(self.times) > self.max_slices:
            self.thin(t)

    def thin(self, now: float):
        window = self.window if self.window is not None else 0.1 * now
        old = [i for i, s in enumerate(self.times) if s < now - window]
        drop = set(old[1::2])
        if not drop:
            drop = set(range(1, len(self.times) - 1, 2))
        self.times = [s for i, s in enumerate(self.times) if i not in drop]
        self.positions = [x for i, x in enumerate(self.positions) if i not in drop]
        logger.debug("thinned particle history to %d slices at t=%g", len(self.times), now)

    def __len__(self):
        return len(self.times)


@define
class ParticleEnsemble:
    """N particles in d dimensions with per-particle random streams."""

    positions: np.ndarray
    seed: int
    stream_ids: np.ndarray
    streams: ParticleStreams = field(eq=False, repr=False)
    history: SliceHistory = field(factory=SliceHistory)
    t: float = 0.0
    step_count: int = 0
    last_drift: Optional[np.ndarray] = field(default=None, eq=False, repr=False)
    mesh_cache: dict = field(factory=dict, eq=False, repr=False)

    @property
    def N(self):
        return self.positions.shape[0]

    @property
    def d(self):
        return self.positions.shape[1]

    def manifest(self):
        return self.streams.manifest()


def sample_initial(
    m_rho0: GaussianMixture,
    N: int,
    seed: int,
    stream_ids: Optional[Sequence[int]] = None,
    block: int = DEFAULT_RNG_BLOCK,
    window: Optional[float] = None,
    max_slices: Optional[int] = None,
) -> ParticleEnsemble:
    """N draws from the mixture: a component by weight, then its Gaussian.

    Each particle uses the head of its own stream, so relabelling particles
    together with their stream ids relabels the sample.
    """
    m_rho0.validate_probability()
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    stream_ids = np.arange(N) if stream_ids is None else np.asarray(stream_ids)
    if stream_ids.shape != (N,):
        raise DomainError(f"need {N} stream ids, got {stream_ids.shape}")
    streams = ParticleStreams(seed, stream_ids, m_rho0.d, block)
    cumulative = np.cumsum(m_rho0.weights)
    cumulative[-1] = 1.0
    which = np.searchsorted(cumulative, streams.uniforms(), side="right")
    positions = m_rho0.means[which] + np.sqrt(m_rho0.variances[which])[:, np.newaxis] * (
        streams.normals()
    )
    history = SliceHistory(window=window, max_slices=max_slices)
    history.append(0.0, positions)
    return ParticleEnsemble(positions, seed, stream_ids, streams, history)
