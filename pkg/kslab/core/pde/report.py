"""Decay functionals of a solved density."""
import math
from typing import Optional, Sequence

from attrs import define, field
import numpy as np

from ..bounds import BootstrapSequence, DerivedConstants, ModelParams, derive_constants
from ..density import NormSeries, plain_norm_series, script_N
from ..errors import DomainError
from ..fields import GaussianMixture, heat_convolve_mixture
from ..models.grid import GridSpec
from .history import History

__all__ = ["DecayEntry", "DecayReport", "density_decay_report", "initial_layer_series"]


@define(frozen=True)
class DecayEntry:
    """Sup over the run of ||rho_t||_r, weighted by t^(1-d/2r) when r > d/2."""

    r: float
    kind: str
    value: float
    bound: Optional[float] = None
    bound_name: Optional[str] = None

    def to_dict(self):
        return {
            "r": self.r,
            "kind": self.kind,
            "value": self.value,
            "bound": self.bound,
            "bound_name": self.bound_name,
        }


@define(frozen=True)
class DecayReport:
    entries: tuple
    series: dict = field(eq=False, repr=False)

    def entry(self, r: float) -> DecayEntry:
        for entry in self.entries:
            if math.isclose(entry.r, r):
                return entry
        raise KeyError(r)

    def to_dict(self):
        return {"entries": [entry.to_dict() for entry in self.entries]}


def _constants_or_none(params: ModelParams):
    try:
        return derive_constants(params)
    except DomainError:
        return None


def density_decay_report(
    history: History,
    params: ModelParams,
    exponents: Sequence[float],
    constants: Optional[DerivedConstants] = None,
    bootstrap: Optional[BootstrapSequence] = None,
) -> DecayReport:
    """Plain sups for r <= d/2, weighted sups for r > d/2, against C_q and the bootstrap."""
    d = params.d
    if constants is None:
        constants = _constants_or_none(params)
    fields = history.rho_fields()
    times = history.times
    entries = []
    series = {}
    for r in exponents:
        if r <= d / 2:
            kind = "plain_sup"
            norms = plain_norm_series(fields, times, r)
        else:
            kind = "weighted_sup"
            positive = times > 0
            norms = script_N(
                [f for f, keep in zip(fields, positive) if keep], times[positive], r, d
            )
        bound, bound_name = None, None
        if math.isclose(r, params.q) and constants is not None and constants.C_q is not None:
            bound, bound_name = constants.C_q, "C_q"
        elif math.isclose(r, d / 2) and bootstrap is not None:
            bound, bound_name = bootstrap.density_bound, "bootstrap"
        entries.append(DecayEntry(r, kind, norms.sup, bound, bound_name))
        series[r] = norms
    return DecayReport(tuple(entries), series)


def initial_layer_series(
    rho0: GaussianMixture, grid: GridSpec, r: float, times: Sequence[float]
) -> NormSeries:
    """t^(1-d/2r) ||g_t * rho0||_r, which vanishes as t -> 0 when r > d/2."""
    if not r > rho0.d / 2:
        raise DomainError(f"r must exceed d/2 = {rho0.d / 2}, got {r}")
    times = np.asarray(times, dtype=float)
    fields = [grid.sample(heat_convolve_mixture(rho0, t).evaluate) for t in times]
    return script_N(fields, times, r, rho0.d)
