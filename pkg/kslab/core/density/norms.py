"""L^r norms, weighted decay functionals and distances of grid fields."""
import math
from typing import Sequence

from attrs import define, field
import numpy as np

from ..errors import DomainError
from ..models.grid import GridField

__all__ = [
    "NormSeries",
    "lq_norm_grid",
    "script_N",
    "plain_norm_series",
    "field_distance",
    "interpolation_bound",
    "holder_pair",
    "convergence_order",
    "decay_weight_exponent",
]


def _check_exponent(r: float):
    if not r >= 1:
        raise DomainError(f"r must be in [1, inf], got {r}")


def lq_norm_grid(f: GridField, r: float) -> float:
    """(sum |f|^r h^d)^(1/r); the grid max for r = inf. Vector fields use |f|."""
    _check_exponent(r)
    values = f.magnitude()
    if math.isinf(r):
        return float(values.max())
    return float((np.sum(values**r) * f.grid.cell_volume) ** (1 / r))


def decay_weight_exponent(d: int, r: float):
    """1 - d/(2r), the power of t in the weighted norm."""
    return 1.0 if math.isinf(r) else 1 - d / (2 * r)


@define
class NormSeries:
    """Norms ||f_t||_r at increasing times, optionally weighted by t^alpha."""

    times: np.ndarray = field(converter=lambda v: np.asarray(v, dtype=float))
    norms: np.ndarray = field(converter=lambda v: np.asarray(v, dtype=float))
    r: float
    weight_exponent: float = 0.0

    def __attrs_post_init__(self):
        if self.times.shape != self.norms.shape:
            raise DomainError("times and norms differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("times must be strictly increasing")
        if self.weight_exponent != 0 and np.any(self.times <= 0):
            raise DomainError("weighted norms need times > 0")

    @property
    def values(self):
        """Weighted norms t^alpha ||f_t||_r."""
        if self.weight_exponent == 0:
            return self.norms.copy()
        return self.times**self.weight_exponent * self.norms

    @property
    def running_sup(self):
        return np.maximum.accumulate(self.values)

    @property
    def sup(self):
        return float(self.values.max()) if len(self.values) else math.nan

    def rows(self):
        return np.column_stack([self.times, self.norms, self.values, self.running_sup])

    def to_csv(self, path, header_comment: str = ""):
        header = "t,norm,weighted,running_sup"
        if header_comment:
            header = f"# {header_comment}\n{header}"
        np.savetxt(path, self.rows(), delimiter=",", header=header, comments="", fmt="%.17g")


def script_N(fields: Sequence[GridField], times: Sequence[float], r: float, d: int = None):
    """Weighted norms t^(1-d/2r) ||f_t||_r with their running sup."""
    _check_exponent(r)
    if d is None:
        d = fields[0].d
    norms = [lq_norm_grid(f, r) for f in fields]
    return NormSeries(times, norms, r, decay_weight_exponent(d, r))


def plain_norm_series(fields: Sequence[GridField], times: Sequence[float], r: float):
    _check_exponent(r)
    return NormSeries(times, [lq_norm_grid(f, r) for f in fields], r, 0.0)


def field_distance(f: GridField, g: GridField, r: float) -> float:
    """||f - g||_r on the torus."""
    f.check_same_grid(g)
    return lq_norm_grid(GridField(f.grid, f.values - g.values), r)


def interpolation_bound(f: GridField, r: float, r1: float, r2: float):
    """(||f||_r, ||f||_r1^theta ||f||_r2^(1-theta)) with 1/r = theta/r1 + (1-theta)/r2."""
    if not min(r1, r2) <= r <= max(r1, r2):
        raise DomainError(f"r={r} is not between {r1} and {r2}")
    inverse = [0.0 if math.isinf(s) else 1 / s for s in (r, r1, r2)]
    theta = 1.0 if r1 == r2 else (inverse[0] - inverse[2]) / (inverse[1] - inverse[2])
    rhs = lq_norm_grid(f, r1) ** theta * lq_norm_grid(f, r2) ** (1 - theta)
    return lq_norm_grid(f, r), rhs


def holder_pair(f: GridField, g: GridField, r: float):
    """(||f g||_1, ||f||_r ||g||_r') with r' the conjugate exponent."""
    f.check_same_grid(g)
    if r == 1:
        conjugate = math.inf
    elif math.isinf(r):
        conjugate = 1.0
    else:
        conjugate = r / (r - 1)
    product = GridField(f.grid, f.magnitude() * g.magnitude())
    return lq_norm_grid(product, 1), lq_norm_grid(f, r) * lq_norm_grid(g, conjugate)


def convergence_order(coarse_error: float, fine_error: float, refinement: float = 2.0):
    """Observed order from errors at two resolutions a factor ``refinement`` apart."""
    return math.log(coarse_error / fine_error) / math.log(refinement)
