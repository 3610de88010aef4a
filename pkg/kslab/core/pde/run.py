"""Run the PDE solver from a RunConfig."""
import logging
from typing import List, Optional

from attrs import define, field
import numpy as np

from ..bounds import ModelParams
from ..constants import NEGATIVE_DENSITY_TOL
from ..density import lq_norm_grid
from ..errors import BlowUpError, BlowUpReport
from ..models.config import RunConfig
from .history import History
from .solver import SolverState, step

logger = logging.getLogger(__name__)

__all__ = ["PdeRun", "SUMMARY_COLUMNS", "solve"]

SUMMARY_COLUMNS = (
    "t",
    "mass",
    "norm_dhalf",
    "norm_q",
    "sup_rho",
    "sup_grad_c",
    "negative_mass",
)


@define
class PdeRun:
    """Outcome of a PDE run: final state, history, per-step summary and blow-up, if any."""

    config: RunConfig
    params: ModelParams
    state: SolverState
    summary: List[tuple] = field(factory=list)
    blowup: Optional[BlowUpReport] = None

    @property
    def history(self) -> History:
        return self.state.history

    @property
    def config_hash(self):
        return self.config.config_hash

    @property
    def completed(self):
        return self.blowup is None

    def summary_array(self):
        return np.array(self.summary, dtype=float).reshape(-1, len(SUMMARY_COLUMNS))


def _summary_row(state: SolverState):
    d, q = state.params.d, state.params.q
    grad_c = state.spectral.gradient(state.spectral.forward(state.c.values))
    return (
        state.t,
        state.rho.mass(),
        lq_norm_grid(state.rho, max(d / 2, 1.0)),
        lq_norm_grid(state.rho, q),
        float(np.abs(state.rho.values).max()),
        float(np.sqrt(np.sum(grad_c**2, axis=0)).max()),
        state.rho.negative_part(NEGATIVE_DENSITY_TOL),
    )


def solve(config: RunConfig, params: Optional[ModelParams] = None) -> PdeRun:
    """Step from the mixtures to T, or until the blow-up detector fires."""
    params = params or config.params()
    grid = config.grid_spec()
    section = config.grid
    state = SolverState.from_mixtures(
        params,
        grid,
        config.rho0,
        config.c0,
        section.dt,
        workers=config.workers(),
        order=section.order,
        blowup_cap=section.blowup_cap,
        safety=section.safety,
        history=History.with_memory_cap(grid, section.history_cap_mb),
    )
    run = PdeRun(config, params, state)
    run.summary.append(_summary_row(state))
    steps = int(round(params.T / section.dt))
    logger.info(
        "solving %d steps of dt=%g on %s (hash %s)", steps, section.dt, grid, config.config_hash
    )
    try:
        for count in range(steps):
            step(state)
            run.summary.append(_summary_row(state))
            if steps >= 10 and (count + 1) % (steps // 10) == 0:
                row = run.summary[-1]
                logger.info("t=%.4g mass=%.12g sup=%.4g", row[0], row[1], row[4])
    except BlowUpError as err:
        logger.warning("%s", err)
        run.blowup = err.report
    return run
