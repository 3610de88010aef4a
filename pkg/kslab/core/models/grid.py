"""Periodic grid fields on the torus [-L/2, L/2)^d."""
import math

from attrs import define, field
import numpy as np

from ..errors import DomainError, GridMismatchError

__all__ = ["GridSpec", "GridField"]


def _valid_points(instance, attribute, value):
    if value < 2 or value % 2:
        raise DomainError(f"grid needs an even number of points per axis, got {value}")


@define(frozen=True)
class GridSpec:
    """Uniform grid of n points per axis on a torus of side box_length."""

    d: int = field(converter=int)
    n: int = field(converter=int, validator=_valid_points)
    box_length: float = field(converter=float)

    @d.validator
    def _check_d(self, attribute, value):
        if value not in (1, 2, 3):
            raise DomainError(f"d must be 1, 2 or 3, got {value}")

    @box_length.validator
    def _check_box(self, attribute, value):
        if not value > 0:
            raise DomainError(f"box_length must be > 0, got {value}")

    @property
    def spacing(self):
        return self.box_length / self.n

    @property
    def cell_volume(self):
        return self.spacing**self.d

    @property
    def shape(self):
        return (self.n,) * self.d

    def axis(self):
        return -self.box_length / 2 + self.spacing * np.arange(self.n)

    def coordinates(self):
        """Grid points as an array of shape (n, ..., n, d)."""
        axis = self.axis()
        return np.stack(np.meshgrid(*([axis] * self.d), indexing="ij"), axis=-1)

    def sample(self, func) -> "GridField":
        """Sample a function of points (..., d); vector results go to a leading axis."""
        values = np.asarray(func(self.coordinates()), dtype=float)
        if values.shape == self.shape + (self.d,):
            values = np.moveaxis(values, -1, 0)
        return GridField(self, values)

    def zeros(self) -> "GridField":
        return GridField(self, np.zeros(self.shape))

    def to_dict(self):
        return {"d": self.d, "n": self.n, "box_length": self.box_length}


@define
class GridField:
    """Scalar field of shape (n,)*d or vector field of shape (d,) + (n,)*d."""

    grid: GridSpec
    values: np.ndarray = field(converter=lambda values: np.asarray(values, dtype=float))

    def __attrs_post_init__(self):
        shape = self.grid.shape
        if self.values.shape not in (shape, (self.grid.d,) + shape):
            raise DomainError(f"values of shape {self.values.shape} do not fit grid {shape}")

    @property
    def d(self):
        return self.grid.d

    @property
    def n(self):
        return self.grid.n

    @property
    def box_length(self):
        return self.grid.box_length

    @property
    def is_vector(self):
        return self.values.ndim == self.grid.d + 1

    def magnitude(self):
        """Pointwise Euclidean norm for vector fields, absolute value otherwise."""
        if self.is_vector:
            return np.sqrt(np.sum(self.values**2, axis=0))
        return np.abs(self.values)

    def mass(self):
        return float(self.values.sum() * self.grid.cell_volume)

    def check_same_grid(self, other: "GridField"):
        if self.grid != other.grid or self.values.shape != other.values.shape:
            raise GridMismatchError(
                f"{self.grid} {self.values.shape} vs {other.grid} {other.values.shape}"
            )

    def roll(self, shift: tuple):
        """Translate by a whole number of cells along each axis."""
        axes = tuple(range(self.values.ndim - self.grid.d, self.values.ndim))
        return GridField(self.grid, np.roll(self.values, shift, axis=axes))

    def copy(self):
        return GridField(self.grid, self.values.copy())

    def negative_part(self, tol: float):
        """Mass sitting below -tol * sup, as a positive number."""
        floor = -tol * max(float(np.abs(self.values).max()), math.ulp(1.0))
        below = self.values[self.values < floor]
        return float(-below.sum() * self.grid.cell_volume)
