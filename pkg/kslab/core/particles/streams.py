"""Counter-based random streams, one per particle."""
from typing import Sequence

import numpy as np

from ..constants import DEFAULT_RNG_BLOCK
from ..errors import DomainError

__all__ = ["ParticleStreams", "STREAM_SCHEME"]

STREAM_SCHEME = "philox4x64 keyed by (seed, stream id), normals prefetched in blocks"


class ParticleStreams:
    """One Philox generator per particle, keyed by (seed, stream id).

    A particle's draws depend only on its key, never on how particles are
    grouped, ordered or scheduled.
    """

    def __init__(
        self, seed: int, stream_ids: Sequence[int], d: int, block: int = DEFAULT_RNG_BLOCK
    ):
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must fit in 64 bits, got {seed}")
        self.seed = int(seed)
        self.stream_ids = np.asarray(stream_ids, dtype=np.uint64)
        self.d = d
        self.block = block
        self.generators = [
            np.random.Generator(np.random.Philox(key=np.array([self.seed, stream], np.uint64)))
            for stream in self.stream_ids
        ]
        self._buffer = None
        self._cursor = block

    def __len__(self):
        return len(self.generators)

    def uniforms(self):
        """One uniform per particle."""
        return np.array([generator.random() for generator in self.generators])

    def normals(self):
        """One standard normal d-vector per particle, drawn directly."""
        return np.stack([generator.standard_normal(self.d) for generator in self.generators])

    def next_normals(self):
        """Next (N, d) block row of Brownian increments."""
        if self._cursor == self.block:
            self._buffer = np.stack(
                [generator.standard_normal((self.block, self.d)) for generator in self.generators]
            )
            self._cursor = 0
        draws = self._buffer[:, self._cursor, :]
        self._cursor += 1
        return draws

    def manifest(self):
        return {
            "seed": self.seed,
            "scheme": STREAM_SCHEME,
            "block": self.block,
            "stream_ids": (
                "identity"
                if np.array_equal(self.stream_ids, np.arange(len(self.stream_ids)))
                else self.stream_ids.tolist()
            ),
        }
