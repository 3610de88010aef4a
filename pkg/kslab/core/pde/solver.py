"""Exponential time differencing for the parabolic-parabolic Keller-Segel system."""
import logging
import math
from typing import Optional

from attrs import define, field
import numpy as np

from ..bounds import ModelParams
from ..constants import DEFAULT_BLOWUP_CAP, DEFAULT_SAFETY
from ..errors import BlowUpError, BlowUpReport, DomainError, StabilityError
from ..fields import GaussianMixture
from ..models.grid import GridField, GridSpec
from .history import History
from .spectral import Spectral, phi1, phi2

logger = logging.getLogger(__name__)

__all__ = ["SolverState", "step", "nonlinear_terms"]


@define
class SolverState:
    """Density rho and concentration c at time t, advanced in place by ``step``."""

    t: float
    rho: GridField
    c: GridField
    params: ModelParams
    dt: float
    order: int = 1
    step_count: int = 0
    blowup_cap: float = DEFAULT_BLOWUP_CAP
    safety: float = DEFAULT_SAFETY
    history: Optional[History] = None
    spectral: Spectral = field(default=None, eq=False, repr=False)
    _propagators: dict = field(factory=dict, eq=False, repr=False)
    _start: float = field(init=False, eq=False, repr=False)

    def __attrs_post_init__(self):
        if self.t < 0 or not self.dt > 0:
            raise DomainError(f"need t >= 0 and dt > 0, got t={self.t} dt={self.dt}")
        if self.order not in (1, 2):
            raise DomainError(f"order must be 1 or 2, got {self.order}")
        self.rho.check_same_grid(self.c)
        self._start = self.t - self.step_count * self.dt
        if self.spectral is None:
            self.spectral = Spectral(self.grid)
        if self.history is not None and not len(self.history):
            self.history.append(self.t, self.rho.values, self.c.values)

    @classmethod
    def from_mixtures(
        cls,
        params: ModelParams,
        grid: GridSpec,
        rho0: GaussianMixture,
        c0: GaussianMixture,
        dt: float,
        workers: int = 1,
        **kwargs,
    ):
        rho = grid.sample(rho0.evaluate)
        # The torus truncates the tails; restore the mixture mass exactly.
        rho.values *= rho0.mass / rho.mass()
        return cls(
            t=0.0,
            rho=rho,
            c=grid.sample(c0.evaluate),
            params=params,
            dt=dt,
            spectral=Spectral(grid, workers),
            **kwargs,
        )

    def advance_clock(self):
        self.step_count += 1
        self.t = self._start + self.step_count * self.dt

    @property
    def grid(self):
        return self.rho.grid

    def propagators(self):
        """exp(z), dt phi1(z), dt phi2(z) for z = L dt of both equations, cached per dt."""
        key = (self.dt, self.params.lam)
        if key not in self._propagators:
            k_squared = self.spectral.k_squared
            self._propagators.clear()
            self._propagators[key] = tuple(
                (np.exp(z), self.dt * phi1(z), self.dt * phi2(z))
                for z in (
                    -k_squared / 2 * self.dt,
                    -(k_squared / 2 + self.params.lam) * self.dt,
                )
            )
        return self._propagators[key]


def nonlinear_terms(state: SolverState, rho_hat: np.ndarray, c_hat: np.ndarray):
    """Transforms of -chi div(rho grad c) and of the source rho."""
    if state.params.chi == 0:
        return np.zeros_like(rho_hat), rho_hat
    spectral = state.spectral
    flux = spectral.inverse(rho_hat) * spectral.gradient(c_hat)
    return -state.params.chi * spectral.divergence_hat(flux), rho_hat


def _check_stability(state: SolverState):
    limit = state.grid.spacing**2 * state.safety
    if state.params.chi > 0 and state.dt > limit:
        raise StabilityError(f"dt={state.dt} exceeds h^2 * safety = {limit:.3g}")


def _check_blowup(state: SolverState):
    sup = float(np.abs(state.rho.values).max())
    reason = None
    if not math.isfinite(sup) or not np.all(np.isfinite(state.c.values)):
        reason = "non-finite values"
    elif sup > state.blowup_cap:
        reason = f"sup norm above cap {state.blowup_cap:g}"
    if reason:
        raise BlowUpError(BlowUpReport(state.t, state.step_count, sup, reason))


def step(state: SolverState) -> SolverState:
    """Advance (rho, c) by dt: exact linear part, explicit nonlinearity."""
    _check_stability(state)
    spectral = state.spectral
    (exp_rho, p1_rho, p2_rho), (exp_c, p1_c, p2_c) = state.propagators()
    rho_hat = spectral.forward(state.rho.values)
    c_hat = spectral.forward(state.c.values)

    n_rho, n_c = nonlinear_terms(state, rho_hat, c_hat)
    new_rho = exp_rho * rho_hat + p1_rho * n_rho
    new_c = exp_c * c_hat + p1_c * n_c
    if state.order == 2:
        m_rho, m_c = nonlinear_terms(state, new_rho, new_c)
        new_rho = new_rho + p2_rho * (m_rho - n_rho)
        new_c = new_c + p2_c * (m_c - n_c)

    state.rho = GridField(state.grid, spectral.inverse(new_rho))
    state.c = GridField(state.grid, spectral.inverse(new_c))
    state.advance_clock()
    _check_blowup(state)
    if state.history is not None:
        state.history.append(state.t, state.rho.values, state.c.values)
    return state
