"""Tests for the forward model: fundamental solution, scattered-field
synthesis, the multiplicative noise model, and the differential-operator
residual check.

Frozen values were computed from the independent closed forms / oracles in
``_oracles`` (direct complex arithmetic in 3D; series/quadrature Bessel
oracles in 2D).
"""
from __future__ import annotations

import numpy as np
import pytest

import _oracles as orc
from bhsource.errors import ConditioningError, DomainError, SingularityError
from bhsource.forward import (
    FrequencyGrid,
    MeasurementSet,
    PointSource,
    SourceConfig,
    fundamental_solution,
    noise_matrix,
    pde_residual,
    scattered_field,
    synthesize_measurements,
)
from _helpers import (
    circle_sensors,
    make_sources,
    synth,
    tetrahedral_sensors_3d,
    triple_grid,
)

# Frozen oracle outputs at k = 1, |x - y| = 1.
PHI3_AT_1_1 = 0.006860487804636112 + 0.03348106667514548j
PHI2_AT_1_1 = -0.04453618078120819 + 0.09564971081974581j


class TestFundamentalSolution:
    def test_3d_closed_form(self):
        x = np.array([1.0, 0.0, 0.0])
        y = np.zeros(3)
        value = fundamental_solution(1.0, x, y, 3)
        direct = ((np.cos(1.0) - np.exp(-1.0)) + 1j * np.sin(1.0)) / (8 * np.pi)
        assert value == pytest.approx(direct, abs=1e-14)
        assert value == pytest.approx(PHI3_AT_1_1, abs=1e-14)

    def test_2d_composition(self):
        x = np.array([1.0, 0.0])
        y = np.zeros(2)
        value = fundamental_solution(1.0, x, y, 2)
        assert value == pytest.approx(PHI2_AT_1_1, abs=1e-10)
        assert value == pytest.approx(orc.fundamental_2d(1.0, 1.0), abs=1e-10)

    def test_3d_matches_oracle_random_draws(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            k = rng.uniform(0.2, 3.0)
            r = rng.uniform(0.3, 5.0)
            x = np.array([r, 0.0, 0.0])
            assert fundamental_solution(k, x, np.zeros(3), 3) == pytest.approx(
                orc.fundamental_3d(k, r), rel=1e-12)

    def test_symmetry_in_arguments(self):
        rng = np.random.default_rng(23)
        for dim in (2, 3):
            for _ in range(50):
                x = rng.uniform(-3.0, 3.0, size=dim)
                y = rng.uniform(-3.0, 3.0, size=dim)
                if np.linalg.norm(x - y) < 1e-6:
                    continue
                k = rng.uniform(0.3, 2.0)
                assert fundamental_solution(k, x, y, dim) == \
                    fundamental_solution(k, y, x, dim)

    def test_coincident_points_raise(self):
        x = np.array([1.0, 2.0])
        with pytest.raises(SingularityError):
            fundamental_solution(1.0, x, x, 2)

    def test_nonpositive_frequency_raises(self):
        x = np.array([1.0, 0.0, 0.0])
        with pytest.raises(DomainError):
            fundamental_solution(0.0, x, np.zeros(3), 3)


class TestScatteredField:
    def test_empty_config_is_zero(self):
        empty = make_sources(3, [])
        assert scattered_field(empty, np.array([1.0, 1.0, 1.0]), 1.0) == 0.0

    def test_single_unit_source_equals_fundamental_solution(self):
        config = make_sources(3, [((0.5, 0.2, -0.1), 1.0)])
        x = np.array([2.0, 1.0, 0.3])
        assert scattered_field(config, x, 1.3) == fundamental_solution(
            1.3, x, np.array([0.5, 0.2, -0.1]), 3)

    def test_opposite_equidistant_sources_cancel(self):
        config = make_sources(2, [((1.0, 0.0), 1.0 + 0.5j),
                                  ((-1.0, 0.0), -1.0 - 0.5j)])
        value = scattered_field(config, np.array([0.0, 2.0]), 0.8)
        assert abs(value) < 1e-14

    def test_linearity_over_sources(self):
        entries = [((0.0, 0.0, 0.0), 1.0 + 1.0j),
                   ((1.0, 0.5, 0.0), -0.7j),
                   ((0.0, 1.0, 2.0), 2.0)]
        merged = make_sources(3, entries)
        x = np.array([3.0, -1.0, 1.0])
        k = 1.1
        total = scattered_field(merged, x, k)
        parts = sum(scattered_field(make_sources(3, [entry]), x, k)
                    for entry in entries)
        assert total == pytest.approx(parts, rel=1e-14)

    def test_3d_far_field_decay(self):
        config = make_sources(3, [((0.0, 0.0, 0.0), 1.0)])
        k = 1.0
        direction = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
        bound = 1.05 / (8 * np.pi * k ** 2)
        for radius in (10.0, 100.0, 1000.0):
            value = scattered_field(config, radius * direction, k)
            assert 0.0 < abs(value) * radius <= bound

    def test_2d_imaginary_part_identity_real_strengths(self):
        # For real strengths, Im(8 k^2 u(x,k)) = sum tau_m J0(k r_m).
        config = make_sources(2, [((2.0, 2.0), 1.0), ((4.0, 4.0), 1.3),
                                  ((2.0, 4.0), -0.4)])
        x = np.array([8.0, 3.0])
        for k in (0.5, 1.0, 2.7):
            u = scattered_field(config, x, k)
            expected = sum(
                src.strength.real * orc.j0_series40(
                    k * np.linalg.norm(x - src.position))
                for src in config.sources)
            assert np.imag(8 * k ** 2 * u) == pytest.approx(expected, abs=1e-10)

    def test_3d_scatter_identity(self):
        # 8 pi k^2 u = sum (tau_m / r_m) (e^{i k r_m} - e^{-k r_m}).
        config = make_sources(3, [((2.0, 2.0, 2.0), 1.0 + 1.0j),
                                  ((0.0, 1.0, 0.0), 0.5 - 0.2j)])
        x = np.array([-1.0, -1.0, -1.0])
        for k in (0.4, 1.0, 1.9):
            u = scattered_field(config, x, k)
            expected = sum(
                src.strength / np.linalg.norm(x - src.position)
                * (np.exp(1j * k * np.linalg.norm(x - src.position))
                   - np.exp(-k * np.linalg.norm(x - src.position)))
                for src in config.sources)
            assert 8 * np.pi * k ** 2 * u == pytest.approx(expected, abs=1e-12)

    def test_evaluation_at_source_raises(self):
        config = make_sources(2, [((1.0, 1.0), 1.0)])
        with pytest.raises(SingularityError):
            scattered_field(config, np.array([1.0, 1.0]), 1.0)


class TestDataTypes:
    def test_point_source_rejects_zero_strength(self):
        with pytest.raises(DomainError):
            PointSource(np.array([0.0, 0.0]), 0.0)

    def test_point_source_rejects_non_finite_position(self):
        with pytest.raises(DomainError):
            PointSource(np.array([np.inf, 0.0]), 1.0)

    def test_source_config_rejects_duplicate_positions(self):
        with pytest.raises(DomainError):
            make_sources(2, [((1.0, 1.0), 1.0), ((1.0, 1.0), 2.0)])

    def test_source_config_rejects_mixed_dimensions(self):
        src = PointSource(np.array([1.0, 1.0, 1.0]), 1.0)
        with pytest.raises(DomainError):
            SourceConfig(2, (src,))

    def test_frequency_grid_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            FrequencyGrid(np.array([0.0, 1.0]))

    def test_frequency_grid_rejects_non_increasing(self):
        with pytest.raises(DomainError):
            FrequencyGrid(np.array([1.0, 1.0, 2.0]))

    def test_measurement_set_rejects_shape_mismatch(self):
        sensors = tetrahedral_sensors_3d()
        freqs = triple_grid(1.0)
        with pytest.raises(DomainError):
            MeasurementSet(sensors, freqs, np.zeros((2, 3), dtype=complex))


class TestSynthesizeMeasurements:
    def setup_method(self):
        self.config = make_sources(3, [((2.0, 2.0, 2.0), 1.0 + 1.0j)])
        self.sensors = tetrahedral_sensors_3d()
        self.freqs = triple_grid(1.0)

    def test_noiseless_matches_exact_field(self):
        ms = synth(self.config, self.sensors, self.freqs)
        for l, x in enumerate(self.sensors.points):
            for j, k in enumerate(self.freqs.values):
                assert ms.samples[l, j] == scattered_field(self.config, x, k)

    def test_same_seed_reproduces(self):
        a = synth(self.config, self.sensors, self.freqs, noise=0.1, seed=5)
        b = synth(self.config, self.sensors, self.freqs, noise=0.1, seed=5)
        assert np.array_equal(a.samples, b.samples)

    def test_different_seeds_differ(self):
        a = synth(self.config, self.sensors, self.freqs, noise=0.1, seed=5)
        b = synth(self.config, self.sensors, self.freqs, noise=0.1, seed=6)
        assert not np.array_equal(a.samples, b.samples)

    def test_noise_is_bounded_multiplicative(self):
        exact = synth(self.config, self.sensors, self.freqs).samples
        noisy = synth(self.config, self.sensors, self.freqs,
                      noise=0.1, seed=3).samples
        ratio = np.abs(noisy / exact - 1.0)
        assert np.all(ratio <= 0.1 + 1e-12)
        assert np.any(ratio > 0.01)

    def test_noise_rows_depend_only_on_seed_and_sensor_index(self):
        # Per-sensor noise streams: adding sensors must not change the
        # noise applied to existing rows.
        small = noise_matrix(9, 3, 5)
        large = noise_matrix(9, 6, 5)
        assert np.array_equal(large[:3], small)
        assert np.all(np.abs(small) <= 1.0)

    def test_sensor_at_source_raises(self):
        bad = make_sources(3, [((1.0, 0.0, 0.0), 1.0)])
        with pytest.raises(SingularityError):
            synth(bad, self.sensors, self.freqs)

    def test_negative_noise_rejected(self):
        with pytest.raises(DomainError):
            synth(self.config, self.sensors, self.freqs, noise=-0.1)


class TestPdeResidual:
    def test_single_source_residual_small(self):
        config = make_sources(3, [((0.0, 0.0, 0.0), 1.0)])
        x = np.array([2.0, 0.0, 0.0])
        k = 1.0
        residual = pde_residual(config, x, k, h=1e-2)
        magnitude = abs(scattered_field(config, x, k))
        assert residual <= 1e-4 * magnitude

    def test_2d_residual_small(self):
        config = make_sources(2, [((0.0, 0.0), 1.0 - 0.3j)])
        x = np.array([1.1, 0.3])
        k = 0.9
        residual = pde_residual(config, x, k, h=1e-2)
        magnitude = abs(scattered_field(config, x, k))
        assert residual <= 1e-3 * magnitude

    def test_empty_config_zero_residual(self):
        assert pde_residual(make_sources(3, []),
                            np.array([1.0, 1.0, 1.0]), 1.0) == 0.0

    def test_second_order_convergence(self):
        config = make_sources(3, [((0.0, 0.0, 0.0), 1.0)])
        x = np.array([0.0, 1.5, 0.0])
        coarse = pde_residual(config, x, 1.2, h=2e-2)
        fine = pde_residual(config, x, 1.2, h=1e-2)
        assert 3.0 <= coarse / fine <= 5.0

    def test_point_near_source_rejected(self):
        config = make_sources(3, [((0.0, 0.0, 0.0), 1.0)])
        with pytest.raises(ConditioningError):
            pde_residual(config, np.array([0.05, 0.0, 0.0]), 1.0, h=1e-2)
