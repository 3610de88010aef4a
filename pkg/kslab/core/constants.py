from platformdirs import user_data_dir
import os


USER_DATA_PATH = os.path.join(user_data_dir(), "kslab")
CONFIG_PATH = os.path.join(USER_DATA_PATH, "config.toml")

# Environment variable consulted when --workers is not given:
WORKERS_ENV = "KSLAB_WORKERS"

# Binary snapshot and CSV layout version:
FORMAT_VERSION = 1
SNAPSHOT_MAGIC = b"KSLBGRID"
POSITIONS_MAGIC = b"KSLBPART"
HASH_DIGITS = 12

# Process exit codes:
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_CHECK_FAILURE = 3
EXIT_BLOW_UP = 4

# Model defaults:
DEFAULT_LAMBDA = 0.0
DEFAULT_BANDWIDTH_FACTOR = 1.06
DEFAULT_CHUNK_SIZE = 256
DEFAULT_RNG_BLOCK = 32
DEFAULT_HISTORY_CAP_MB = 512
DEFAULT_BLOWUP_CAP = 1e8
DEFAULT_SAFETY = 1.0
NEGATIVE_DENSITY_TOL = 1e-8
REAL_ROOT_TOL = 1e-9
BOOTSTRAP_CAP = 1e12
MIXTURE_SIGMA_SPAN = 8.0
MIXTURE_POINTS_PER_SIGMA = 8
MIXTURE_RESOLUTION_TOL = 1e-6
MIXTURE_MAX_POINTS = 2**20
BOX_SIGMA_SPAN = 12.0

# Pass/fail tolerances per check id; overridable from [tolerances]:
DEFAULT_TOLERANCES = {
    "mass": 1e-10,
    "decay_q": 0.05,
    "decay_dhalf": 0.0,
    "drift_bound": 0.2,
    "epsilon_uniformity": 0.03,
    "kde_l1": 0.1,
    "kde_l1_initial": 0.05,
    "duhamel_c": 1e-3,
    "mild_residual": 1e-2,
    "history_quadrature": 1e-2,
    "trend": 0.0,
}
