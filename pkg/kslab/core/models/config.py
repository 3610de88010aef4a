import hashlib
import json
import math
import os
from typing import Optional
import warnings

from attrs import asdict, define, evolve, field
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..bounds import ModelParams
from ..constants import (
    BOX_SIGMA_SPAN,
    CONFIG_PATH,
    DEFAULT_BANDWIDTH_FACTOR,
    DEFAULT_BLOWUP_CAP,
    DEFAULT_CHUNK_SIZE,
    DEFAULT_HISTORY_CAP_MB,
    DEFAULT_LAMBDA,
    DEFAULT_RNG_BLOCK,
    DEFAULT_SAFETY,
    DEFAULT_TOLERANCES,
    HASH_DIGITS,
    WORKERS_ENV,
)
from ..errors import ConfigError, ResolutionWarning
from ..fields import GaussianMixture, lq_norm_mixture
from .backend import DriftBackendConfig, DriftMode
from .grid import GridSpec

__all__ = [
    "Config",
    "RunConfig",
    "ModelSection",
    "GridSection",
    "ParticleSection",
    "RunSection",
]


@define(frozen=True)
class ModelSection:
    d: int = field(converter=int)
    chi: float = field(converter=float)
    lam: float = field(default=DEFAULT_LAMBDA, converter=float)
    T: float = field(default=1.0, converter=float)
    q: Optional[float] = field(default=None)


@define(frozen=True)
class GridSection:
    n: int = 64
    box_length: float = 12.0
    dt: float = 1e-3
    order: int = 1
    history_cap_mb: float = DEFAULT_HISTORY_CAP_MB
    blowup_cap: float = DEFAULT_BLOWUP_CAP
    safety: float = DEFAULT_SAFETY

    def __attrs_post_init__(self):
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")


@define(frozen=True)
class ParticleSection:
    N: int = 1000
    dt: float = 0.01
    mode: str = "pairwise"
    epsilon: Optional[float] = None
    delta: float = 0.0
    mesh_n: Optional[int] = None
    bandwidth_factor: float = DEFAULT_BANDWIDTH_FACTOR
    kde_n: Optional[int] = None
    chunk_size: int = DEFAULT_CHUNK_SIZE
    rng_block: int = DEFAULT_RNG_BLOCK
    thin_window: Optional[float] = None
    max_slices: Optional[int] = None
    include_chi_on_b0: bool = True

    def __attrs_post_init__(self):
        if self.mode not in DriftMode.__members__:
            raise ValueError(f"mode must be one of {list(DriftMode.__members__)}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")


@define(frozen=True)
class RunSection:
    seed: int = 0
    out: str = "."
    workers: Optional[int] = None


def _section(cls, data: dict, name: str):
    try:
        return cls(**data.get(name, {}))
    except TypeError as err:
        raise ConfigError(f"[{name}]: {err}") from err
    except ValueError as err:
        raise ConfigError(f"[{name}]: {err}") from err


def _mixture(data: dict, name: str, d: int):
    records = data.get(name)
    if not records:
        raise ConfigError(f"[[{name}]]: at least one component is required")
    try:
        return GaussianMixture.from_records(records, d)
    except KeyError as err:
        raise ConfigError(f"[[{name}]]: missing field {err}") from err
    except ValueError as err:
        raise ConfigError(f"[[{name}]]: {err}") from err


@define(frozen=True)
class RunConfig:
    """Everything one run depends on; its hash names the outputs."""

    model: ModelSection
    rho0: GaussianMixture
    c0: GaussianMixture
    grid: GridSection = GridSection()
    particles: ParticleSection = ParticleSection()
    run: RunSection = RunSection()
    tolerances: dict = field(factory=dict)

    @classmethod
    def from_dict(cls, data: dict):
        if "model" not in data:
            raise ConfigError("[model]: section is required")
        model = _section(ModelSection, data, "model")
        rho0 = _mixture(data, "rho0", model.d)
        try:
            rho0.validate_probability()
        except ValueError as err:
            raise ConfigError(f"[[rho0]]: {err}") from err
        tolerances = dict(data.get("tolerances", {}))
        unknown = set(tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"[tolerances]: unknown checks {sorted(unknown)}")
        config = cls(
            model=model,
            rho0=rho0,
            c0=_mixture(data, "c0", model.d),
            grid=_section(GridSection, data, "grid"),
            particles=_section(ParticleSection, data, "particles"),
            run=_section(RunSection, data, "run"),
            tolerances=tolerances,
        )
        config.validate()
        return config

    def validate(self):
        """Build every derived object once so bad values surface as ConfigError."""
        try:
            self.grid_spec()
            self.backend()
            ModelParams(self.model.d, self.model.chi, self.model.lam, self.model.T, self.q)
        except ValueError as err:
            raise ConfigError(str(err)) from err
        widest = math.sqrt(max(self.rho0.variances.max(), self.c0.variances.max()))
        if self.grid.box_length < BOX_SIGMA_SPAN * widest:
            warnings.warn(
                f"box_length {self.grid.box_length:g} is below {BOX_SIGMA_SPAN:g} standard"
                f" deviations of the widest initial component ({widest:.3g});"
                " the torus will truncate its tails",
                ResolutionWarning,
                stacklevel=2,
            )

    def to_dict(self):
        data = {
            "model": asdict(self.model),
            "rho0": self.rho0.to_records(),
            "c0": self.c0.to_records(),
            "grid": asdict(self.grid),
            "particles": asdict(self.particles),
            "run": {"seed": self.run.seed},
            "tolerances": dict(sorted(self.tolerances.items())),
        }
        return data

    @property
    def config_hash(self):
        """Digest of the canonical JSON form; output paths and workers are excluded."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:HASH_DIGITS]

    @property
    def q(self):
        return self.model.q if self.model.q is not None else 1.5 * self.model.d

    def with_overrides(self, seed: int = None, out: str = None, workers: int = None):
        run = self.run
        if seed is not None:
            run = evolve(run, seed=seed)
        if out is not None:
            run = evolve(run, out=out)
        if workers is not None:
            run = evolve(run, workers=workers)
        return evolve(self, run=run)

    def tolerance(self, check_id: str):
        return self.tolerances.get(check_id, DEFAULT_TOLERANCES[check_id])

    def workers(self):
        """Worker count from the config, else the environment variable, else 1."""
        if self.run.workers:
            return int(self.run.workers)
        return int(os.environ.get(WORKERS_ENV, 1))

    def grid_spec(self):
        return GridSpec(self.model.d, self.grid.n, self.grid.box_length)

    def kde_grid_spec(self):
        return GridSpec(self.model.d, self.particles.kde_n or self.grid.n, self.grid.box_length)

    def backend(self, epsilon: float = None):
        section = self.particles
        if epsilon is None:
            epsilon = section.dt if section.epsilon is None else section.epsilon
        mesh = None
        if section.mesh_n:
            mesh = GridSpec(self.model.d, section.mesh_n, self.grid.box_length)
        return DriftBackendConfig(
            mode=section.mode,
            epsilon=epsilon,
            delta=section.delta,
            mesh=mesh,
            include_chi_on_b0=section.include_chi_on_b0,
            chunk_size=section.chunk_size,
            workers=self.workers(),
        )

    def params(self) -> ModelParams:
        """ModelParams with the initial-data norms computed from the mixtures."""
        d = self.model.d
        return ModelParams(
            d=d,
            chi=self.model.chi,
            lam=self.model.lam,
            T=self.model.T,
            q=self.q,
            norm_grad_c0_d=lq_norm_mixture(self.c0, d, gradient=True),
            norm_p0_dhalf=lq_norm_mixture(self.rho0, max(d / 2, 1.0)),
        )

    def matches_model(self, other: "RunConfig"):
        """Same initial data, chi, lambda and horizon."""
        return (
            self.rho0 == other.rho0
            and self.c0 == other.c0
            and math.isclose(self.model.chi, other.model.chi)
            and math.isclose(self.model.lam, other.model.lam)
            and math.isclose(self.model.T, other.model.T)
        )


@define
class Config:
    """TOML configuration file holding a run."""

    data: dict = {}

    def __init__(self, data_str: Optional[str] = None, path: Optional[str] = None):
        self.load(data_str, path)

    def load(self, data_str: Optional[str] = None, path: Optional[str] = None):
        self.data = {}
        try:
            if data_str:
                self.data = tomllib.loads(data_str)
            else:
                with open(path or CONFIG_PATH, "rb") as config_file:
                    self.data = tomllib.load(config_file)
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"config is not valid TOML: {err}") from err
        except OSError as err:
            raise ConfigError(f"config cannot be read: {err}") from err

    def run_config(self) -> RunConfig:
        return RunConfig.from_dict(self.data)
