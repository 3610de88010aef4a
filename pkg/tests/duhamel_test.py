"""Tests for the Duhamel representations computed from stored snapshots."""
# pylint: disable=missing-class-docstring, no-self-use, missing-function-docstring
# pylint: disable=redefined-outer-name
import math

import numpy as np
import pytest

from kslab.core.bounds import ModelParams, existence_threshold
from kslab.core.errors import InsufficientHistoryError
from kslab.core.fields import GaussianMixture, heat_convolve_mixture, lq_norm_mixture
from kslab.core.models import GridSpec
from kslab.core.pde import (
    History,
    SolverState,
    Spectral,
    duhamel_c,
    exponential_trapezoid,
    mild_residual,
    step,
)


@pytest.fixture
def grid():
    return GridSpec(2, 32, 12.0)


@pytest.fixture
def rho0():
    return GaussianMixture.standard(2)


@pytest.fixture
def c0():
    return GaussianMixture.standard(2, 1.5).translate((0.5, 0.0))


def stepped(params, grid, rho0, c0, dt, order=1):
    state = SolverState.from_mixtures(
        params, grid, rho0, c0, dt, order=order, history=History(grid)
    )
    for _ in range(int(round(params.T / dt))):
        step(state)
    return state


class TestExponentialTrapezoid:
    def test_constant_integrand(self):
        rate = np.array([0.0, 1.0, 4.0])
        times = np.linspace(0, 2, 5)
        total = exponential_trapezoid(times, lambda i: np.ones(3), rate, 2.0)
        expected = np.array([2.0, 1 - math.exp(-2.0), (1 - math.exp(-8.0)) / 4])
        assert np.allclose(total, expected, rtol=1e-13)

    def test_linear_integrand_is_exact(self):
        rate = np.array([0.5])
        times = np.array([0.0, 0.7, 1.0])
        total = exponential_trapezoid(times, lambda i: np.array([times[i]]), rate, 1.0)
        # integral of s e^(-(1 - s)/2) over [0, 1]
        expected = 2 - 4 * (1 - math.exp(-0.5))
        assert total[0] == pytest.approx(expected, rel=1e-13)


class TestDuhamel:
    def test_matches_stepped_concentration(self, grid, rho0, c0):
        norms = ModelParams(
            d=2,
            chi=0.0,
            lam=1.0,
            T=0.5,
            norm_grad_c0_d=lq_norm_mixture(c0, 2, gradient=True),
            norm_p0_dhalf=lq_norm_mixture(rho0, 1),
        )
        params = norms.with_chi(0.1 * existence_threshold(norms))
        state = stepped(params, grid, rho0, c0, 0.01, order=2)
        c = duhamel_c(state.history, c0, state.t, params.lam, 1e-2, state.spectral)
        error = np.abs(c.values - state.c.values).max() / np.abs(state.c.values).max()
        assert error <= 1e-3

    def test_needs_history_from_zero(self, grid, c0):
        history = History(grid)
        history.append(0.5, np.zeros(grid.shape), np.zeros(grid.shape))
        history.append(1.0, np.zeros(grid.shape), np.zeros(grid.shape))
        with pytest.raises(InsufficientHistoryError):
            duhamel_c(history, c0, 1.0, 0.0)

    def test_needs_history_up_to_t(self, grid, rho0, c0):
        state = stepped(ModelParams(d=2, chi=0.0, T=0.1), grid, rho0, c0, 0.01)
        with pytest.raises(InsufficientHistoryError):
            duhamel_c(state.history, c0, 0.25, 0.0)

    def test_coarse_history_detected(self, grid, rho0, c0):
        state = stepped(ModelParams(d=2, chi=0.0, lam=1.0, T=0.2), grid, rho0, c0, 0.1)
        with pytest.raises(InsufficientHistoryError):
            duhamel_c(state.history, c0, state.t, 1.0, 1e-12, Spectral(grid))

    def test_heat_flow_without_decay_closed_form(self, rho0, c0):
        # With chi = lam = 0 the integral is t g_t * rho0.
        grid = GridSpec(2, 64, 24.0)
        state = stepped(ModelParams(d=2, chi=0.0, T=0.3), grid, rho0, c0, 0.01)
        c = duhamel_c(state.history, c0, state.t, 0.0, spectral=state.spectral)
        t = state.t
        exact = (
            grid.sample(heat_convolve_mixture(c0, t).evaluate).values
            + t * grid.sample(heat_convolve_mixture(rho0, t).evaluate).values
        )
        assert np.abs(c.values - exact).max() <= 1e-4 * np.abs(exact).max()
        assert c.mass() == pytest.approx(1.0 + t, rel=1e-8)


class TestMildResidual:
    def test_first_order_in_dt(self, grid, rho0, c0):
        params = ModelParams(d=2, chi=0.5, lam=1.0, T=0.2)
        residuals = [
            mild_residual(state, state.history)
            for state in (stepped(params, grid, rho0, c0, dt) for dt in (0.01, 0.005, 0.0025))
        ]
        assert residuals[0] / residuals[1] >= 1.8
        assert residuals[1] / residuals[2] >= 1.8

    def test_heat_flow_has_no_residual(self, grid, rho0, c0):
        state = stepped(ModelParams(d=2, chi=0.0, T=0.1), grid, rho0, c0, 0.01)
        assert mild_residual(state, state.history) <= 1e-12

    def test_invariant_under_grid_translation(self, grid, rho0, c0):
        params = ModelParams(d=2, chi=0.5, lam=1.0, T=0.1)
        plain = SolverState.from_mixtures(params, grid, rho0, c0, 0.01, history=History(grid))
        moved = SolverState(
            0.0,
            plain.rho.roll((4, -3)),
            plain.c.roll((4, -3)),
            params,
            0.01,
            history=History(grid),
        )
        for state in (plain, moved):
            for _ in range(10):
                step(state)
        residual = mild_residual(plain, plain.history)
        assert residual > 0
        assert mild_residual(moved, moved.history) == pytest.approx(residual, rel=1e-8)
