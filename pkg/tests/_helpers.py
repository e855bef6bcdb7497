"""Shared builders for the test suite.

Constructs the reference sensor layouts, frequency grids, and source
configurations that many tests share, so each test file stays focused on
the behaviour it checks.
"""
from __future__ import annotations

import numpy as np

from bhsource.forward import (
    FrequencyGrid,
    PointSource,
    SensorArray,
    SourceConfig,
    synthesize_measurements,
)
from bhsource.geometry import circle_array_2d, sphere_array_3d

__all__ = [
    "band_grid",
    "triple_grid",
    "harmonic_grid",
    "circle_sensors",
    "sphere_sensors",
    "tetrahedral_sensors_3d",
    "make_sources",
    "square_sources_2d",
    "PI_GLYPH_POSITIONS",
    "PI_GLYPH_STRENGTHS",
    "pi_glyph_sources",
    "synth",
]


def band_grid(k_min: float, k_max: float, step: float) -> FrequencyGrid:
    """Uniform frequency band k_min, k_min+step, ..., k_max."""
    count = int(round((k_max - k_min) / step)) + 1
    return FrequencyGrid(k_min + step * np.arange(count))


def triple_grid(k0: float) -> FrequencyGrid:
    """The three frequencies k0, 2k0, 4k0 used by the single-source solver."""
    return FrequencyGrid(np.array([k0, 2.0 * k0, 4.0 * k0]))


def harmonic_grid(k0: float, count: int) -> FrequencyGrid:
    """Harmonic frequencies k0, 2k0, ..., count*k0 for the moment solver."""
    return FrequencyGrid(k0 * np.arange(1, count + 1, dtype=float))


def circle_sensors(count: int = 10, center=(3.0, 3.0), radius: float = 5.0,
                   phase: float = 0.0) -> SensorArray:
    return circle_array_2d(count, center, radius, phase=phase)


def sphere_sensors(count: int = 11, center=(1.0, 1.0, 1.0),
                   radius: float = 3.0) -> SensorArray:
    return sphere_array_3d(count, center, radius)


def tetrahedral_sensors_3d() -> SensorArray:
    """Four non-coplanar sensors used by the single-source examples."""
    points = np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [-1.0, -1.0, -1.0],
    ])
    return SensorArray(3, points)


def make_sources(dimension: int, entries) -> SourceConfig:
    """Build a SourceConfig from (position, strength) pairs."""
    sources = tuple(
        PointSource(np.asarray(pos, dtype=float), complex(strength))
        for pos, strength in entries
    )
    return SourceConfig(dimension, sources)


def square_sources_2d(strengths=(1.0, 1.1, 1.2, 1.3)) -> SourceConfig:
    """Four sources on the unit-square corners (2,2),(2,4),(4,2),(4,4)."""
    positions = [(2.0, 2.0), (2.0, 4.0), (4.0, 2.0), (4.0, 4.0)]
    return make_sources(2, zip(positions, strengths))


# Eleven sources arranged as a pi glyph: a horizontal bar of five at
# y = 4.5 and two three-source legs at x = 2.25 and x = 3.75.  Matches the
# layout bundled in the table2 reference config.
PI_GLYPH_POSITIONS = (
    (1.5, 4.5), (2.25, 4.5), (3.0, 4.5), (3.75, 4.5), (4.5, 4.5),
    (2.25, 3.5), (2.25, 2.5), (2.25, 1.5),
    (3.75, 3.5), (3.75, 2.5), (3.75, 1.5),
)
PI_GLYPH_STRENGTHS = (
    1.0 + 1.0j, 1.0, 0.9 + 1.0j, 1.2, 0.5 + 0.9j,
    0.7 + 0.8j, 1.1, 0.9 + 0.6j,
    1.0, 0.8 + 0.7j, 1.3,
)


def pi_glyph_sources() -> SourceConfig:
    return make_sources(2, zip(PI_GLYPH_POSITIONS, PI_GLYPH_STRENGTHS))


def synth(config: SourceConfig, sensors: SensorArray, freqs: FrequencyGrid,
          noise: float = 0.0, seed: int = 0):
    return synthesize_measurements(config, sensors, freqs,
                                   noise_level=noise, seed=seed)
