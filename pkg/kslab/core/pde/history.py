"""Retained (rho, c) snapshots with geometric thinning."""
import logging
from typing import List, Optional

from attrs import define, field
import numpy as np

from ..models.grid import GridField, GridSpec

logger = logging.getLogger(__name__)

__all__ = ["Snapshot", "History"]

# Snapshots newer than this fraction of the elapsed time are never thinned.
RECENT_FRACTION = 0.1


@define(frozen=True)
class Snapshot:
    t: float
    rho: np.ndarray
    c: np.ndarray


@define
class History:
    """Snapshots at strictly increasing times, thinned when over ``max_snapshots``."""

    grid: GridSpec
    max_snapshots: Optional[int] = None
    snapshots: List[Snapshot] = field(factory=list)
    thinned: bool = False

    @classmethod
    def with_memory_cap(cls, grid: GridSpec, cap_mb: float):
        per_snapshot = 2 * np.prod(grid.shape) * np.dtype(float).itemsize
        return cls(grid, max(3, int(cap_mb * 2**20 // per_snapshot)))

    def append(self, t: float, rho: np.ndarray, c: np.ndarray):
        if self.snapshots and not t > self.snapshots[-1].t:
            raise ValueError(f"snapshot time {t} does not increase")
        self.snapshots.append(Snapshot(t, np.array(rho, dtype=float), np.array(c, dtype=float)))
        if self.max_snapshots and len(self.snapshots) > self.max_snapshots:
            self.thin()

    def thin(self):
        """Drop every other snapshot older than the recent window; keep the first."""
        now = self.snapshots[-1].t
        old = [i for i, snap in enumerate(self.snapshots) if snap.t < RECENT_FRACTION * now]
        drop = set(old[1::2])
        if not drop:
            # Everything is recent: thin uniformly, never the endpoints.
            drop = set(range(1, len(self.snapshots) - 1, 2))
        self.snapshots = [snap for i, snap in enumerate(self.snapshots) if i not in drop]
        self.thinned = True
        logger.debug("thinned history to %d snapshots at t=%g", len(self.snapshots), now)

    def __len__(self):
        return len(self.snapshots)

    @property
    def times(self):
        return np.array([snap.t for snap in self.snapshots])

    def up_to(self, t: float, rtol: float = 1e-9):
        """Snapshots with time <= t; the last one must sit at t."""
        return [snap for snap in self.snapshots if snap.t <= t * (1 + rtol)]

    def rho_fields(self):
        return [GridField(self.grid, snap.rho) for snap in self.snapshots]

    def c_fields(self):
        return [GridField(self.grid, snap.c) for snap in self.snapshots]
