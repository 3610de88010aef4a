"""Tests for the particle system: streams, sampling, drift, stepping and KDE."""
# pylint: disable=missing-class-docstring, no-self-use, missing-function-docstring
# pylint: disable=redefined-outer-name
import math

import numpy as np
import pytest

from kslab.core.bounds import ModelParams
from kslab.core.errors import (
    BackendMismatchError,
    BandwidthWarning,
    CutoffError,
    DomainError,
    NonFiniteParticleError,
)
from kslab.core.fields import Component, GaussianMixture
from kslab.core.models import GridSpec
from kslab.core.models.backend import DriftBackendConfig, DriftMode
from kslab.core.models.config import Config
from kslab.core.particles import (
    ParticleStreams,
    SliceHistory,
    advance,
    drift_eval,
    empirical_density,
    linear_drift,
    sample_initial,
    silverman_bandwidth,
    simulate,
    slice_weights,
)

CONFIG = """
[model]
d = 2
chi = 0.05
lam = 1.0
T = 0.2

[[rho0]]
weight = 1.0
mean = [0.0, 0.0]
variance = 1.0

[[c0]]
weight = 1.0
mean = [0.5, 0.0]
variance = 1.0

[grid]
n = 32
box_length = 12.0

[particles]
N = 200
dt = 0.05
"""


@pytest.fixture
def standard():
    return GaussianMixture.standard(2)


@pytest.fixture
def params():
    return ModelParams(d=2, chi=0.05, lam=1.0, T=1.0)


@pytest.fixture
def run_config():
    return Config(CONFIG).run_config()


class TestStreams:
    def test_same_key_same_draws(self):
        first = ParticleStreams(7, [0, 1, 2], 2)
        second = ParticleStreams(7, [0, 1, 2], 2)
        assert np.array_equal(first.normals(), second.normals())

    def test_draws_follow_the_stream_id(self):
        ordered = ParticleStreams(7, [0, 1, 2], 2).normals()
        shuffled = ParticleStreams(7, [2, 0, 1], 2).normals()
        assert np.array_equal(shuffled, ordered[[2, 0, 1]])

    def test_seed_changes_draws(self):
        assert not np.array_equal(
            ParticleStreams(7, [0, 1], 2).normals(), ParticleStreams(8, [0, 1], 2).normals()
        )

    def test_block_size_does_not_change_increments(self):
        small = ParticleStreams(3, [0, 1, 2, 3], 2, block=4)
        large = ParticleStreams(3, [0, 1, 2, 3], 2, block=16)
        for _ in range(10):
            assert np.array_equal(small.next_normals(), large.next_normals())

    def test_seed_out_of_range(self):
        with pytest.raises(DomainError):
            ParticleStreams(-1, [0], 2)
        with pytest.raises(DomainError):
            ParticleStreams(2**64, [0], 2)

    def test_manifest(self):
        assert ParticleStreams(5, [0, 1, 2], 1).manifest()["stream_ids"] == "identity"
        assert ParticleStreams(5, [4, 1], 1).manifest()["stream_ids"] == [4, 1]


class TestSampling:
    def test_relabelling_particles_with_their_streams(self, standard):
        base = sample_initial(standard, 3, 11)
        relabelled = sample_initial(standard, 3, 11, stream_ids=[2, 0, 1])
        assert np.array_equal(relabelled.positions, base.positions[[2, 0, 1]])

    def test_moments(self, standard):
        positions = sample_initial(standard, 5000, 1).positions
        assert np.all(np.abs(positions.mean(axis=0)) < 0.06)
        assert np.all(np.abs(positions.var(axis=0) - 1) < 0.1)

    def test_component_weights(self):
        mixture = GaussianMixture(
            (Component(0.25, (-10.0, 0.0), 1.0), Component(0.75, (10.0, 0.0), 1.0)), 2
        )
        positions = sample_initial(mixture, 4000, 2).positions
        assert np.mean(positions[:, 0] < 0) == pytest.approx(0.25, abs=0.03)

    def test_history_starts_at_zero(self, standard):
        ensemble = sample_initial(standard, 10, 0)
        assert ensemble.history.times == [0.0]
        assert ensemble.N == 10
        assert ensemble.d == 2

    def test_bad_sizes(self, standard):
        with pytest.raises(DomainError):
            sample_initial(standard, 0, 0)
        with pytest.raises(DomainError):
            sample_initial(standard, 3, 0, stream_ids=[0, 1])

    def test_needs_probability(self):
        mixture = GaussianMixture((Component(2.0, (0.0,), 1.0),), 1)
        with pytest.raises(ValueError):
            sample_initial(mixture, 5, 0)


class TestSliceHistory:
    def test_times_must_increase(self):
        history = SliceHistory()
        history.append(0.0, np.zeros((2, 1)))
        with pytest.raises(DomainError):
            history.append(0.0, np.zeros((2, 1)))

    def test_thinning_keeps_start_and_window(self):
        history = SliceHistory(window=0.1, max_slices=8)
        for k in range(21):
            history.append(k * 0.05, np.zeros((2, 1)))
        assert len(history) <= 8
        assert history.times[0] == 0.0
        assert history.times[-3:] == pytest.approx([0.9, 0.95, 1.0])
        assert all(a < b for a, b in zip(history.times, history.times[1:]))


class TestBackendConfig:
    def test_needs_a_cutoff(self):
        with pytest.raises(CutoffError):
            DriftBackendConfig(epsilon=0.0, delta=0.0)

    def test_cutoff_only_without_regularization(self):
        with pytest.raises(CutoffError):
            DriftBackendConfig(epsilon=0.1, delta=0.1)

    def test_mesh_needs_grid(self):
        with pytest.raises(BackendMismatchError):
            DriftBackendConfig(mode="mesh", epsilon=0.1)

    def test_mode_from_name(self):
        assert DriftBackendConfig(mode="pairwise", epsilon=0.1).mode is DriftMode.pairwise


class TestSliceWeights:
    def test_regularized_adds_the_current_node(self):
        cfg = DriftBackendConfig(epsilon=0.1)
        weights = slice_weights([0.0, 0.1, 0.2, 0.3], 0.3, cfg)
        assert weights == pytest.approx([0.05, 0.1, 0.1, 0.0])

    def test_cutoff_drops_recent_slices(self):
        cfg = DriftBackendConfig(epsilon=0.0, delta=0.15)
        weights = slice_weights([0.0, 0.1, 0.2, 0.3], 0.3, cfg)
        assert weights == pytest.approx([0.05, 0.05, 0.0, 0.0])

    def test_history_must_start_at_zero(self):
        with pytest.raises(DomainError):
            slice_weights([0.1, 0.2], 0.3, DriftBackendConfig(epsilon=0.1))


class TestDrift:
    @pytest.fixture
    def ensemble(self, standard):
        ensemble = sample_initial(standard, 500, 1)
        rng = np.random.default_rng(4)
        for k in range(1, 11):
            shifted = ensemble.history.positions[-1] + 0.2 * rng.normal(size=(500, 2))
            ensemble.history.append(0.05 * k, shifted)
        return ensemble

    def test_zero_chi_has_no_drift(self, standard):
        ensemble = sample_initial(standard, 20, 0)
        params = ModelParams(d=2, chi=0.0)
        drift = drift_eval(ensemble, 0.0, params, DriftBackendConfig(epsilon=0.1), standard)
        assert np.array_equal(drift, np.zeros((20, 2)))

    def test_bare_linear_drift(self, standard, params):
        ensemble = sample_initial(standard, 20, 0)
        cfg = DriftBackendConfig(epsilon=0.1, include_chi_on_b0=False)
        drift = drift_eval(ensemble, 0.3, params.with_chi(0.0), cfg, standard)
        expected = linear_drift(ensemble.positions, 0.3, params, cfg, standard)
        assert np.array_equal(drift, expected)
        assert np.abs(drift).max() > 0

    def test_two_particles_pull_each_other_equally(self, standard):
        pair = sample_initial(standard, 2, 5)
        for k in (1, 2):
            pair.history.append(0.1 * k, pair.positions.copy())
        params = ModelParams(d=2, chi=1.0, lam=0.5)
        cfg = DriftBackendConfig(epsilon=0.1)
        linear = linear_drift(pair.positions, 0.3, params, cfg, standard)
        memory = drift_eval(pair, 0.3, params, cfg, standard) - linear
        assert np.abs(memory).max() > 1e-6
        assert np.allclose(memory[0], -memory[1], rtol=0, atol=1e-12)

    def test_mesh_matches_pairwise(self, ensemble, standard, params):
        pairwise = DriftBackendConfig(epsilon=0.1)
        mesh = DriftBackendConfig(mode="mesh", epsilon=0.1, mesh=GridSpec(2, 128, 16.0))
        linear = params.chi * linear_drift(ensemble.positions, 1.0, params, pairwise, standard)
        direct = drift_eval(ensemble, 1.0, params, pairwise, standard) - linear
        deposited = drift_eval(ensemble, 1.0, params, mesh, standard) - linear
        assert np.abs(deposited - direct).max() <= 0.02 * np.abs(direct).max()

    def test_workers_do_not_change_the_drift(self, ensemble, standard, params):
        single = DriftBackendConfig(epsilon=0.1, chunk_size=64)
        threaded = DriftBackendConfig(epsilon=0.1, chunk_size=64, workers=3)
        assert np.allclose(
            drift_eval(ensemble, 1.0, params, single, standard),
            drift_eval(ensemble, 1.0, params, threaded, standard),
            rtol=1e-12,
            atol=0,
        )


class TestAdvance:
    def test_step_adds_the_stream_increments(self, standard):
        ensemble = sample_initial(standard, 50, 9)
        start = ensemble.positions.copy()
        replica = ParticleStreams(9, np.arange(50), 2)
        replica.uniforms()
        replica.normals()
        free = ModelParams(d=2, chi=0.0)
        advance(ensemble, free, DriftBackendConfig(epsilon=0.1), 0.04, standard)
        assert np.allclose(ensemble.positions, start + 0.2 * replica.next_normals(), atol=1e-15)
        assert ensemble.t == pytest.approx(0.04)
        assert ensemble.history.times == pytest.approx([0.0, 0.04])

    def test_free_particles_spread_like_brownian_motion(self, standard):
        ensemble = sample_initial(standard, 4000, 21)
        params = ModelParams(d=2, chi=0.0, T=0.5)
        cfg = DriftBackendConfig(epsilon=0.05)
        for _ in range(10):
            advance(ensemble, params, cfg, 0.05, standard)
        assert ensemble.positions.var(axis=0).mean() == pytest.approx(1.5, rel=0.1)

    def test_non_finite_particle(self, standard):
        ensemble = sample_initial(standard, 10, 0)
        ensemble.positions = ensemble.positions.copy()
        ensemble.positions[3] = np.nan
        free = ModelParams(d=2, chi=0.0)
        with pytest.raises(NonFiniteParticleError) as err:
            advance(ensemble, free, DriftBackendConfig(epsilon=0.1), 0.1, standard)
        assert err.value.index == 3

    def test_bad_time_step(self, standard, params):
        ensemble = sample_initial(standard, 5, 0)
        with pytest.raises(DomainError):
            advance(ensemble, params, DriftBackendConfig(epsilon=0.1), 0.0, standard)


class TestKde:
    def test_silverman_bandwidth(self):
        positions = np.array([[0.0], [1.0], [2.0], [3.0]])
        expected = math.sqrt(5 / 3) * 4 ** (-1 / 5)
        assert silverman_bandwidth(positions, 1.0) == pytest.approx(expected)

    def test_silverman_needs_two_particles(self):
        with pytest.raises(DomainError):
            silverman_bandwidth(np.zeros((1, 2)))

    def test_unit_mass(self):
        positions = np.random.default_rng(0).normal(size=(300, 2))
        density = empirical_density(positions, 0.4, GridSpec(2, 32, 12.0))
        assert density.mass() == pytest.approx(1.0, abs=1e-12)

    def test_close_to_the_smoothed_law(self):
        positions = np.random.default_rng(0).normal(size=(20000, 1))
        bandwidth = silverman_bandwidth(positions)
        grid = GridSpec(1, 256, 16.0)
        density = empirical_density(positions, bandwidth, grid)
        variance = 1 + bandwidth**2
        exact = np.exp(-grid.axis() ** 2 / (2 * variance)) / math.sqrt(2 * math.pi * variance)
        assert np.abs(density.values - exact).sum() * grid.spacing < 0.06

    def test_bad_bandwidth(self):
        with pytest.raises(DomainError):
            empirical_density(np.zeros((3, 1)), 0.0, GridSpec(1, 16, 4.0))

    def test_few_neighbours_warn(self):
        positions = np.array([[-3.0], [0.0], [3.0]])
        with pytest.warns(BandwidthWarning):
            empirical_density(positions, 0.01, GridSpec(1, 64, 12.0))


class TestSimulate:
    def test_run_records(self, run_config):
        run = simulate(run_config, kde_every=2)
        assert run.ensemble.N == 200
        assert run.ensemble.t == pytest.approx(0.2)
        assert sorted(run.densities) == pytest.approx([0.0, 0.1, 0.2])
        assert run.diagnostics_array().shape == (4, 3)
        assert run.max_scaled_drift() >= 0
        assert run.manifest()["config_hash"] == run_config.config_hash

    def test_reproducible(self, run_config):
        first = simulate(run_config)
        second = simulate(run_config)
        assert np.array_equal(first.ensemble.positions, second.ensemble.positions)

    def test_workers_do_not_change_the_run(self, run_config):
        single = simulate(run_config.with_overrides(workers=1))
        threaded = simulate(run_config.with_overrides(workers=2))
        assert np.allclose(
            single.ensemble.positions, threaded.ensemble.positions, rtol=1e-12, atol=1e-14
        )

    @pytest.mark.slow
    @pytest.mark.parametrize("chi, T, N", ((0.0, 1.0, 10_000), (0.05, 0.2, 2_000)))
    def test_eight_workers_match_one_bit_for_bit(self, chi, T, N):
        text = CONFIG.replace("chi = 0.05", f"chi = {chi}").replace("T = 0.2", f"T = {T}")
        config = Config(text).run_config()
        single = simulate(config.with_overrides(workers=1), N=N, kde_every=4)
        threaded = simulate(config.with_overrides(workers=8), N=N, kde_every=4)
        assert np.array_equal(single.ensemble.positions, threaded.ensemble.positions)
        assert sorted(single.densities) == sorted(threaded.densities)
        for t, density in single.densities.items():
            assert np.array_equal(density.values, threaded.densities[t].values)
        assert np.array_equal(single.diagnostics_array(), threaded.diagnostics_array())

    def test_override_particle_count_and_epsilon(self, run_config):
        run = simulate(run_config, epsilon=0.2, N=50)
        assert run.ensemble.N == 50
        assert run.backend.epsilon == 0.2
