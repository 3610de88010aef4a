"""Versioned binary dumps of grid snapshots and particle positions."""
import logging
from typing import Tuple

import numpy as np

from ..constants import FORMAT_VERSION, POSITIONS_MAGIC, SNAPSHOT_MAGIC
from ..models.grid import GridField, GridSpec
from .constants import PAYLOAD_DTYPE, POSITIONS_HEADER, SNAPSHOT_HEADER

logger = logging.getLogger(__name__)

__all__ = ["write_snapshot", "read_snapshot", "write_positions", "read_positions"]


def _check_header(header, magic: bytes, path):
    if header["magic"] != magic:
        raise ValueError(f"{path}: not a kslab file of this kind (magic {header['magic']!r})")
    if header["version"] != FORMAT_VERSION:
        raise ValueError(f"{path}: format version {header['version']} is not {FORMAT_VERSION}")


def write_snapshot(path, field: GridField, t: float, config_hash: str):
    """Header then the scalar field values."""
    header = np.zeros((), SNAPSHOT_HEADER)
    header["magic"] = SNAPSHOT_MAGIC
    header["version"] = FORMAT_VERSION
    header["d"] = field.d
    header["n"] = field.n
    header["box_length"] = field.box_length
    header["t"] = t
    header["config_hash"] = config_hash.encode()
    with open(path, "wb") as out:
        out.write(header.tobytes())
        out.write(np.ascontiguousarray(field.values, dtype=PAYLOAD_DTYPE).tobytes())
    logger.debug("wrote snapshot t=%g to %s", t, path)


def read_snapshot(path) -> Tuple[GridField, float, str]:
    with open(path, "rb") as source:
        header = np.frombuffer(source.read(SNAPSHOT_HEADER.itemsize), SNAPSHOT_HEADER)[0]
        _check_header(header, SNAPSHOT_MAGIC, path)
        grid = GridSpec(int(header["d"]), int(header["n"]), float(header["box_length"]))
        values = np.frombuffer(source.read(), PAYLOAD_DTYPE)
    if values.size != np.prod(grid.shape):
        raise ValueError(f"{path}: payload holds {values.size} values, expected {grid.shape}")
    field = GridField(grid, values.reshape(grid.shape).astype(float))
    return field, float(header["t"]), header["config_hash"].decode()


def write_positions(path, positions: np.ndarray, t: float, config_hash: str):
    """Header then the (N, d) particle positions."""
    header = np.zeros((), POSITIONS_HEADER)
    header["magic"] = POSITIONS_MAGIC
    header["version"] = FORMAT_VERSION
    header["N"], header["d"] = positions.shape
    header["t"] = t
    header["config_hash"] = config_hash.encode()
    with open(path, "wb") as out:
        out.write(header.tobytes())
        out.write(np.ascontiguousarray(positions, dtype=PAYLOAD_DTYPE).tobytes())


def read_positions(path) -> Tuple[np.ndarray, float, str]:
    with open(path, "rb") as source:
        header = np.frombuffer(source.read(POSITIONS_HEADER.itemsize), POSITIONS_HEADER)[0]
        _check_header(header, POSITIONS_MAGIC, path)
        values = np.frombuffer(source.read(), PAYLOAD_DTYPE)
    shape = (int(header["N"]), int(header["d"]))
    if values.size != shape[0] * shape[1]:
        raise ValueError(f"{path}: payload holds {values.size} values, expected {shape}")
    return values.reshape(shape).astype(float), float(header["t"]), header["config_hash"].decode()
