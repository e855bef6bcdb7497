"""Multi-source localization in the plane from band-limited multi-frequency data.

Two indicator functionals are available.  With real strengths the imaginary
part of the rescaled field suffices::

    I_real(z) = | sum_l  int_band 8 k^3 Im(u(x_l, k)) J0(k |x_l - z|) dk |

and for complex strengths the full field is used::

    I_cplx(z) = | sum_l  int_band (-8i) k^3 u(x_l, k) J0(k |x_l - z|) dk |

Both concentrate at the true source positions.  Once a position ``z*`` is
accepted, its strength is recovered from a single well-separated sensor by a
ratio of band integrals (see :func:`recover_strength_2d`).
"""

from __future__ import annotations

import time
import warnings

import numpy as np

from . import backend, specfun
from .errors import ConditioningError, DomainError, GeometryError
from .forward import MeasurementSet
from .geometry import SensorArray, no_three_collinear
from .quadrature import BandIntegrand, integrate_band, trapezoid_weights
from .report import ReconstructionReport
from .sampling import (
    DEFAULT_REL_THRESHOLD,
    IndicatorField,
    PeakSet,
    SamplingGrid,
    extract_peaks,
)

#: Indicator variant for purely real scattering strengths.
KIND_REAL = "real_strengths"
#: Indicator variant valid for arbitrary complex strengths.
KIND_COMPLEX = "complex_strengths"

_KINDS = (KIND_REAL, KIND_COMPLEX)

#: Denominator modulus below which strength recovery is refused.
STRENGTH_DENOMINATOR_FLOOR = 1e-12

#: Relative sensor-separation scale below which select_sensor warns.
DEGENERACY_WARN_FACTOR = 1e-9


def _check_kind(kind: str) -> str:
    if kind not in _KINDS:
        raise DomainError(f"indicator kind must be one of {_KINDS}, got {kind!r}")
    return kind


def _band_coefficients(measurements: MeasurementSet, kind: str) -> np.ndarray:
    """Per-(sensor, frequency) complex weights with quadrature folded in.

    The indicator at a node z is then ``|sum_{l,j} coef[l,j] * J0(k_j r_l)|``
    with ``r_l = |x_l - z|``.
    """
    k = measurements.frequencies.values
    w = trapezoid_weights(k)
    u = measurements.samples
    if kind == KIND_REAL:
        coef = (8.0 * k**3 * w) * np.imag(u)
        return np.ascontiguousarray(coef.astype(np.complex128))
    coef = (-8.0j * k**3 * w) * u
    return np.ascontiguousarray(coef)


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


def _indicator_values(
    nodes: np.ndarray, measurements: MeasurementSet, kind: str
) -> np.ndarray:
    _check_nodes_clear_of_sensors(nodes, measurements.sensors)
    coef = _band_coefficients(measurements, kind)
    return backend.kernels().indicator_grid_2d(
        nodes, measurements.sensors.points, measurements.frequencies.values, coef
    )


def indicator_2d(z, measurements: MeasurementSet, kind: str) -> float:
    """Evaluate the selected 2D indicator at a single point."""
    _check_kind(kind)
    if measurements.sensors.dimension != 2:
        raise DomainError("indicator_2d requires 2D measurements")
    z = np.asarray(z, dtype=np.float64).reshape(1, 2)
    return float(_indicator_values(z, measurements, kind)[0])


def indicator_field_2d(
    measurements: MeasurementSet, grid: SamplingGrid, kind: str
) -> IndicatorField:
    """Evaluate the selected 2D indicator on every node of ``grid``."""
    _check_kind(kind)
    if measurements.sensors.dimension != 2 or grid.dimension != 2:
        raise DomainError("indicator_field_2d requires 2D measurements and grid")
    values = _indicator_values(grid.nodes(), measurements, kind)
    return IndicatorField(grid, values)


def recover_strength_2d(
    z_star, sensor_index: int, measurements: MeasurementSet
) -> complex:
    """Recover the strength of a located source from one sensor's band data.

    With ``r* = |x - z*|`` the estimate is the ratio of band integrals::

        tau = int (-8i) k^3 u(x,k) J0(k r*) dk
              / int (H0(k r*) + (2i/pi) K0(k r*)) k J0(k r*) dk

    which cancels exactly on a noiseless single source as the band widens.
    """
    if measurements.sensors.dimension != 2:
        raise DomainError("recover_strength_2d requires 2D measurements")
    sensor_index = int(sensor_index)
    if not 0 <= sensor_index < len(measurements.sensors):
        raise DomainError(f"sensor_index {sensor_index} out of range")
    x = measurements.sensors.points[sensor_index]
    z_star = np.asarray(z_star, dtype=np.float64).reshape(2)
    r_star = float(np.linalg.norm(x - z_star))
    if r_star == 0.0:
        raise DomainError("z_star coincides with the selected sensor")
    k = measurements.frequencies.values
    u = measurements.samples[sensor_index]
    j0 = specfun.bessel_j0(k * r_star)
    numerator = integrate_band(BandIntegrand(k, (-8.0j * k**3) * u * j0))
    kernel = specfun.hankel1_0(k * r_star) + (2.0j / np.pi) * specfun.macdonald_k0(
        k * r_star
    )
    denominator = integrate_band(BandIntegrand(k, kernel * k * j0))
    if abs(denominator) < STRENGTH_DENOMINATOR_FLOOR:
        raise ConditioningError(
            f"strength denominator {abs(denominator):.3e} below "
            f"{STRENGTH_DENOMINATOR_FLOOR:.0e} at r* = {r_star}"
        )
    return complex(numerator / denominator)


def select_sensor(z_star, detected, sensors: SensorArray) -> int:
    """Pick the sensor whose distance to ``z_star`` is best separated.

    Maximizes, over sensors, the minimum over other detected positions of
    ``| |x - z_star| - |x - z_m| |``.  Ties resolve to the lowest index; with
    no other detected positions the first sensor is returned.  A vanishing
    best separation (fully symmetric configuration) triggers a warning.
    """
    if len(sensors) == 0:
        raise DomainError("select_sensor requires at least one sensor")
    z_star = np.asarray(z_star, dtype=np.float64).reshape(sensors.dimension)
    detected = np.asarray(detected, dtype=np.float64).reshape(-1, sensors.dimension)
    others = detected[np.linalg.norm(detected - z_star, axis=1) > 0.0]
    if others.shape[0] == 0:
        return 0
    d_star = np.linalg.norm(sensors.points - z_star, axis=1)
    d_others = np.linalg.norm(
        sensors.points[:, None, :] - others[None, :, :], axis=2
    )
    separation = np.abs(d_others - d_star[:, None]).min(axis=1)
    best = int(np.argmax(separation))
    scale = max(float(d_star.max()), float(d_others.max()))
    if separation[best] <= DEGENERACY_WARN_FACTOR * max(scale, 1.0):
        warnings.warn(
            "all sensors are (numerically) equidistant between the located "
            "source and another detected source; strength recovery may be "
            "degenerate",
            RuntimeWarning,
            stacklevel=2,
        )
    return best


def run_algorithm2(
    measurements: MeasurementSet,
    grid: SamplingGrid,
    kind: str,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
    min_separation: float | None = None,
) -> ReconstructionReport:
    """Full 2D pipeline: indicator field, peak extraction, per-peak strengths."""
    _check_kind(kind)
    if not no_three_collinear(measurements.sensors):
        raise GeometryError("2D inversion requires no three collinear sensors")
    started = time.perf_counter()
    field = indicator_field_2d(measurements, grid, kind)
    peaks = extract_peaks(field, rel_threshold=rel_threshold, min_separation=min_separation)
    positions, strengths = recover_all_strengths_2d(peaks, measurements)
    report = ReconstructionReport(
        estimated_count=len(peaks),
        positions=positions,
        strengths=strengths,
        dimension=2,
        algorithm="multi2d_real" if kind == KIND_REAL else "multi2d_complex",
        sensor_count=len(measurements.sensors),
        indicator_field=field,
    )
    report.runtime_seconds = time.perf_counter() - started
    return report


def recover_all_strengths_2d(
    peaks: PeakSet, measurements: MeasurementSet
) -> tuple:
    """Strengths for every peak via per-peak sensor selection."""
    positions = peaks.positions
    strengths = np.empty(len(peaks), dtype=np.complex128)
    for i in range(len(peaks)):
        sensor = select_sensor(positions[i], positions, measurements.sensors)
        strengths[i] = recover_strength_2d(positions[i], sensor, measurements)
    return positions, strengths
