"""Multi-source localization in space from band-limited multi-frequency data.

The indicator is the modulus of a band integral with an exponential kernel::

    I(z) = | sum_l  int_band 8 k^2 u(x_l, k) e^{-i k |x_l - z|} dk |

whose oscillatory part behaves like a Dirichlet kernel: it grows linearly in
the band width exactly when ``|x_l - z|`` matches a source distance, and stays
bounded otherwise.  Strengths come from the normalized band integral at one
well-separated sensor.
"""

from __future__ import annotations

import time

import numpy as np

from . import backend
from .errors import DomainError, GeometryError
from .forward import MeasurementSet
from .geometry import SensorArray, no_four_coplanar
from .multi2d import select_sensor
from .quadrature import BandIntegrand, integrate_band, trapezoid_weights
from .report import ReconstructionReport
from .sampling import (
    DEFAULT_REL_THRESHOLD,
    IndicatorField,
    PeakSet,
    SamplingGrid,
    extract_peaks,
)


def _band_coefficients(measurements: MeasurementSet) -> np.ndarray:
    """Per-(sensor, frequency) weights: indicator is |sum coef[l,j] e^{-i k_j r_l}|."""
    k = measurements.frequencies.values
    w = trapezoid_weights(k)
    coef = (8.0 * k**2 * w) * measurements.samples
    return np.ascontiguousarray(coef.astype(np.complex128))


def _check_nodes_clear_of_sensors(nodes: np.ndarray, sensors: SensorArray) -> None:
    if nodes.size == 0 or len(sensors) == 0:
        return
    d = np.linalg.norm(nodes[:, None, :] - sensors.points[None, :, :], axis=2)
    hit = np.argwhere(d == 0.0)
    if hit.size:
        i, l = hit[0]
        raise DomainError(
            f"sampling point {tuple(float(c) for c in nodes[i])} coincides with "
            f"sensor {int(l)}"
        )


def _indicator_values(nodes: np.ndarray, measurements: MeasurementSet) -> np.ndarray:
    _check_nodes_clear_of_sensors(nodes, measurements.sensors)
    coef = _band_coefficients(measurements)
    return backend.kernels().indicator_grid_3d(
        nodes, measurements.sensors.points, measurements.frequencies.values, coef
    )


def indicator_3d(z, measurements: MeasurementSet) -> float:
    """Evaluate the 3D band indicator at a single point."""
    if measurements.sensors.dimension != 3:
        raise DomainError("indicator_3d requires 3D measurements")
    z = np.asarray(z, dtype=np.float64).reshape(1, 3)
    return float(_indicator_values(z, measurements)[0])


def indicator_field_3d(measurements: MeasurementSet, grid: SamplingGrid) -> IndicatorField:
    """Evaluate the 3D band indicator on every node of ``grid``."""
    if measurements.sensors.dimension != 3 or grid.dimension != 3:
        raise DomainError("indicator_field_3d requires 3D measurements and grid")
    values = _indicator_values(grid.nodes(), measurements)
    return IndicatorField(grid, values)


def recover_strength_3d(
    z_star, sensor_index: int, measurements: MeasurementSet
) -> complex:
    """Recover a located source's strength from one sensor's band data.

    With ``r* = |x - z*|``::

        tau = r* / (k_max - k_min) * int_band 8 pi k^2 u(x,k) e^{-i k r*} dk

    exact up to O(1/k_max) on noiseless single-source data.
    """
    if measurements.sensors.dimension != 3:
        raise DomainError("recover_strength_3d requires 3D measurements")
    sensor_index = int(sensor_index)
    if not 0 <= sensor_index < len(measurements.sensors):
        raise DomainError(f"sensor_index {sensor_index} out of range")
    k = measurements.frequencies.values
    band_width = float(k[-1] - k[0])
    if band_width <= 0.0:
        raise DomainError("recover_strength_3d requires a nondegenerate band")
    x = measurements.sensors.points[sensor_index]
    z_star = np.asarray(z_star, dtype=np.float64).reshape(3)
    r_star = float(np.linalg.norm(x - z_star))
    if r_star == 0.0:
        raise DomainError("z_star coincides with the selected sensor")
    u = measurements.samples[sensor_index]
    integrand = 8.0 * np.pi * k**2 * u * np.exp(-1.0j * k * r_star)
    total = integrate_band(BandIntegrand(k, integrand))
    return complex(r_star / band_width * total)


def run_algorithm3(
    measurements: MeasurementSet,
    grid: SamplingGrid,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
    min_separation: float | None = None,
) -> ReconstructionReport:
    """Full 3D pipeline: indicator field, peak extraction, per-peak strengths."""
    if not no_four_coplanar(measurements.sensors):
        raise GeometryError("3D inversion requires no four coplanar sensors")
    started = time.perf_counter()
    field = indicator_field_3d(measurements, grid)
    peaks = extract_peaks(field, rel_threshold=rel_threshold, min_separation=min_separation)
    positions, strengths = recover_all_strengths_3d(peaks, measurements)
    report = ReconstructionReport(
        estimated_count=len(peaks),
        positions=positions,
        strengths=strengths,
        dimension=3,
        algorithm="multi3d",
        sensor_count=len(measurements.sensors),
        indicator_field=field,
    )
    report.runtime_seconds = time.perf_counter() - started
    return report


def recover_all_strengths_3d(
    peaks: PeakSet, measurements: MeasurementSet
) -> tuple:
    """Strengths for every peak via per-peak sensor selection."""
    positions = peaks.positions
    strengths = np.empty(len(peaks), dtype=np.complex128)
    for i in range(len(peaks)):
        sensor = select_sensor(positions[i], positions, measurements.sensors)
        strengths[i] = recover_strength_3d(positions[i], sensor, measurements)
    return positions, strengths
