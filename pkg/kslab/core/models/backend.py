from enum import Enum
from typing import Optional

from attrs import define, field

from ..constants import DEFAULT_CHUNK_SIZE
from ..errors import BackendMismatchError, CutoffError, DomainError
from .grid import GridSpec

__all__ = ["DriftMode", "DriftBackendConfig"]


class DriftMode(Enum):
    pairwise = 1
    mesh = 2


@define(frozen=True)
class DriftBackendConfig:
    """How the interaction drift over past slices is evaluated.

    Parameters
    ----------
    mode: DriftMode
        Direct double sum (``pairwise``) or cloud-in-cell deposit plus FFT (``mesh``).
    epsilon: float
        Kernel regularization.
    delta: float
        Memory cutoff: slices with t - s < delta are skipped. Only with epsilon = 0.
    mesh: GridSpec, optional
        Grid used by the mesh backend.
    include_chi_on_b0: bool
        Multiply the linear drift by chi (default) or leave it bare.
    chunk_size: int
        Particles per work unit; results do not depend on the worker count.
    workers: int
        Threads evaluating chunks.
    """

    mode: DriftMode = field(
        default=DriftMode.pairwise,
        converter=lambda mode: DriftMode[mode] if isinstance(mode, str) else mode,
    )
    epsilon: float = field(default=0.0, converter=float)
    delta: float = field(default=0.0, converter=float)
    mesh: Optional[GridSpec] = None
    include_chi_on_b0: bool = True
    chunk_size: int = DEFAULT_CHUNK_SIZE
    workers: int = 1

    def __attrs_post_init__(self):
        if self.epsilon < 0 or self.delta < 0:
            raise DomainError("epsilon and delta must be >= 0")
        if self.epsilon == 0 and self.delta == 0:
            raise CutoffError("epsilon = 0 needs a memory cutoff delta > 0")
        if self.epsilon > 0 and self.delta > 0:
            raise CutoffError("a memory cutoff is only allowed with epsilon = 0")
        if self.mode is DriftMode.mesh and self.mesh is None:
            raise BackendMismatchError("mesh backend requested without a mesh grid")
        if self.chunk_size < 1 or self.workers < 1:
            raise DomainError("chunk_size and workers must be >= 1")

    def to_dict(self):
        return {
            "mode": self.mode.name,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "mesh": self.mesh.to_dict() if self.mesh else None,
            "include_chi_on_b0": self.include_chi_on_b0,
            "chunk_size": self.chunk_size,
        }
