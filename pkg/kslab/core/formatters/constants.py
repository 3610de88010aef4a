"""Constants for formatters."""
import numpy as np

# Little-endian headers preceding raw float64 payloads in C order.
SNAPSHOT_HEADER = np.dtype(
    [
        ("magic", "S8"),
        ("version", "<u4"),
        ("d", "<u4"),
        ("n", "<u4"),
        ("box_length", "<f8"),
        ("t", "<f8"),
        ("config_hash", "S16"),
    ]
)
POSITIONS_HEADER = np.dtype(
    [
        ("magic", "S8"),
        ("version", "<u4"),
        ("d", "<u4"),
        ("N", "<u8"),
        ("t", "<f8"),
        ("config_hash", "S16"),
    ]
)
PAYLOAD_DTYPE = np.dtype("<f8")

CSV_FORMAT = "%.17g"

VERDICT_STYLES = {
    "pass": "green",
    "fail": "bold red",
    "informational": "dim",
}
