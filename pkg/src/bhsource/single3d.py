"""Single-source identification in space from four sensors and three frequencies.

With data at frequencies ``{k0, 2*k0, 4*k0}`` the sensor-to-source distance has
a closed form: writing ``a = 4*u(2k0)/u(k0)`` and ``b = u(4k0)/u(2k0)``, the
combination ``Re(a) - Im(b) / (Im(a)/2)`` collapses algebraically to
``e^{-k0 r}`` on exact data, so ``r = -ln(E)/k0``.  The strength then follows
from the closed-form field of a single source, and the position is the argmax
of a four-sensor consistency indicator over a sampling grid.

The phaseless route (:func:`solve_phaseless_distance`) inverts the strictly
decreasing profile ``f(y) = |e^{iy} - e^{-y}|^2 / y^2`` by bisection.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import (
    ConditioningError,
    DomainError,
    GeometryError,
    InversionError,
)
from .forward import MeasurementSet
from .geometry import SensorArray, no_four_coplanar
from .report import ReconstructionReport
from .sampling import IndicatorField, SamplingGrid

#: Noisy decay estimates in (1, 1 + E_CLAMP_EPS] are clamped instead of failing.
E_CLAMP_EPS = 0.05
_E_CLAMP_VALUE = 1.0 - 1e-12

#: |Im(4 u_2k0 / u_k0)| below this is treated as a vanishing denominator.
DENOMINATOR_FLOOR = 1e-12

#: Indicator cap: values are clipped once the defect sum drops below 1e-14.
INDICATOR_CAP = 1e14
_DEFECT_FLOOR = 1.0 / INDICATOR_CAP

#: Bisection bracket and iteration count for the phaseless profile inverse.
PHASELESS_BRACKET = (1e-8, 200.0)
PHASELESS_ITERATIONS = 200

_HARMONIC_RTOL = 1e-9


@dataclasses.dataclass
class SingleSourceEstimate:
    """Result of the single-source pipeline."""

    distance_per_sensor: tuple
    strength: complex
    position: np.ndarray
    indicator_field: IndicatorField | None = None

    def __post_init__(self) -> None:
        distances = tuple(float(d) for d in self.distance_per_sensor)
        if any(d <= 0.0 for d in distances):
            raise DomainError("recovered distances must be positive")
        self.distance_per_sensor = distances
        self.position = np.asarray(self.position, dtype=np.float64).reshape(-1)
        self.strength = complex(self.strength)


def _wave_gap_squared(y):
    """``|e^{iy} - e^{-y}|^2`` evaluated without cancellation."""
    decay = np.expm1(-y)
    return decay * decay + 4.0 * np.exp(-y) * np.sin(0.5 * y) ** 2


def phaseless_profile(y):
    """The strictly decreasing profile ``f(y) = |e^{iy} - e^{-y}|^2 / y^2``, y > 0."""
    y = np.asarray(y, dtype=np.float64)
    if np.any(y <= 0.0) or not np.all(np.isfinite(y)):
        raise DomainError("phaseless_profile requires finite y > 0")
    out = _wave_gap_squared(y) / (y * y)
    return float(out) if out.ndim == 0 else out


def profile_slope_bound(y):
    """Combination whose strict negativity makes the phaseless profile decreasing.

    ``g(y) = sqrt(2) y sin(y + pi/4) + 2 cos(y) - (y + 1) e^{-y} - e^{y}``;
    the profile derivative equals ``2 e^{-y} g(y) / y^3``.
    """
    y = np.asarray(y, dtype=np.float64)
    out = (
        math.sqrt(2.0) * y * np.sin(y + 0.25 * np.pi)
        + 2.0 * np.cos(y)
        - (y + 1.0) * np.exp(-y)
        - np.exp(y)
    )
    return float(out) if out.ndim == 0 else out


def recover_distance(
    u_k0: complex, u_2k0: complex, u_4k0: complex, k0: float
) -> float:
    """Distance from a sensor to the source via the three-frequency identity."""
    k0 = float(k0)
    if not math.isfinite(k0) or k0 <= 0.0:
        raise DomainError(f"k0 must be positive, got {k0}")
    u_k0 = complex(u_k0)
    u_2k0 = complex(u_2k0)
    u_4k0 = complex(u_4k0)
    if u_k0 == 0.0 or u_2k0 == 0.0:
        raise InversionError("zero field sample: distance identity undefined")
    a = 4.0 * u_2k0 / u_k0
    b = u_4k0 / u_2k0
    half_sine = 0.5 * a.imag
    if abs(a.imag) < DENOMINATOR_FLOOR:
        raise ConditioningError(
            f"oscillatory component {a.imag:.3e} too small to divide by "
            "(sensor distance resonant with k0)"
        )
    decay = a.real - b.imag / half_sine
    if decay <= 0.0 or decay > 1.0 + E_CLAMP_EPS:
        raise InversionError(
            f"decay estimate {decay:.6g} outside (0, {1.0 + E_CLAMP_EPS}]: "
            "noise too large for distance recovery"
        )
    if decay >= 1.0:
        decay = _E_CLAMP_VALUE
    return -math.log(decay) / k0


def recover_strength(u_k0: complex, k0: float, r: float) -> complex:
    """Strength from one sample and a known distance: closed-form field inverse."""
    k0 = float(k0)
    r = float(r)
    if not math.isfinite(k0) or k0 <= 0.0:
        raise DomainError(f"k0 must be positive, got {k0}")
    if not math.isfinite(r) or r <= 0.0:
        raise DomainError(f"distance must be positive, got {r}")
    y = k0 * r
    denominator = complex(math.cos(y) - math.exp(-y), math.sin(y))
    return 8.0 * math.pi * k0**2 * complex(u_k0) * r / denominator


def _indicator_defect(
    r: np.ndarray, u_abs: np.ndarray, k0: float, tau_abs: float
) -> np.ndarray:
    """Sum over sensors of the consistency defect; shape (..., L) -> (...,)."""
    gap = np.sqrt(_wave_gap_squared(k0 * r))
    lhs = r / (tau_abs * gap)
    safe_abs = np.where(u_abs > 0.0, u_abs, 1.0)
    rhs = np.where(u_abs > 0.0, 1.0 / (8.0 * np.pi * k0**2 * safe_abs), np.inf)
    return np.abs(lhs - rhs).sum(axis=-1)


def indicator_single(z, sensors, u_at_k0, k0: float, tau_abs: float) -> float:
    """Four-sensor consistency indicator; large exactly near the source.

    Each sensor contributes ``| r_j / (tau_abs |e^{i k0 r_j} - e^{-k0 r_j}|)
    - 1 / (8 pi k0^2 |u_j|) |`` with ``r_j = |x_j - z|``; the indicator is the
    reciprocal of the sum, capped at ``1e14`` once the sum falls below 1e-14.
    """
    points = sensors.points if isinstance(sensors, SensorArray) else np.asarray(
        sensors, dtype=np.float64
    )
    points = points.reshape(-1, 3)
    z = np.asarray(z, dtype=np.float64).reshape(3)
    u_abs = np.abs(np.asarray(u_at_k0, dtype=np.complex128).reshape(-1))
    if u_abs.shape[0] != points.shape[0]:
        raise DomainError("one field sample per sensor is required")
    k0 = float(k0)
    tau_abs = float(tau_abs)
    if k0 <= 0.0 or tau_abs <= 0.0:
        raise DomainError("k0 and tau_abs must be positive")
    r = np.linalg.norm(points - z, axis=1)
    if np.any(r == 0.0):
        raise DomainError(f"sampling point {tuple(z)} coincides with a sensor")
    defect = _indicator_defect(r, u_abs, k0, tau_abs)
    return float(1.0 / max(float(defect), _DEFECT_FLOOR))


def indicator_field_single(
    grid: SamplingGrid, sensors: SensorArray, u_at_k0, k0: float, tau_abs: float
) -> IndicatorField:
    """Vectorized :func:`indicator_single` over all grid nodes."""
    if grid.dimension != 3 or sensors.dimension != 3:
        raise DomainError("single-source indicator requires 3D grid and sensors")
    u_abs = np.abs(np.asarray(u_at_k0, dtype=np.complex128).reshape(-1))
    if u_abs.shape[0] != len(sensors):
        raise DomainError("one field sample per sensor is required")
    nodes = grid.nodes()
    r = np.linalg.norm(nodes[:, None, :] - sensors.points[None, :, :], axis=2)
    zero = np.argwhere(r == 0.0)
    if zero.size:
        i = int(zero[0, 0])
        raise DomainError(
            f"grid node {tuple(float(c) for c in nodes[i])} coincides with a sensor"
        )
    defect = _indicator_defect(r, u_abs, float(k0), float(tau_abs))
    values = 1.0 / np.maximum(defect, _DEFECT_FLOOR)
    return IndicatorField(grid, values)


def solve_phaseless_distance(abs_u: float, k: float, tau_abs: float) -> float:
    """Distance from a single phaseless sample, via monotone bisection.

    Solves ``f(y) = 64 k^2 pi^2 (abs_u / tau_abs)^2`` for ``y = k r`` inside
    the bracket ``[1e-8, 200]`` and returns ``y / k``.
    """
    abs_u = float(abs_u)
    k = float(k)
    tau_abs = float(tau_abs)
    if abs_u <= 0.0 or k <= 0.0 or tau_abs <= 0.0:
        raise DomainError("abs_u, k, and tau_abs must all be positive")
    target = 64.0 * k**2 * math.pi**2 * (abs_u / tau_abs) ** 2
    lo, hi = PHASELESS_BRACKET
    f_lo = phaseless_profile(lo)
    f_hi = phaseless_profile(hi)
    if not f_hi <= target <= f_lo:
        raise InversionError(
            f"phaseless target {target:.6g} outside the profile range "
            f"[{f_hi:.6g}, {f_lo:.6g}] on the bracket {PHASELESS_BRACKET}"
        )
    for _ in range(PHASELESS_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if phaseless_profile(mid) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) / k


def _harmonic_triple(frequencies: np.ndarray) -> float:
    if frequencies.shape[0] != 3:
        raise DomainError(
            f"single-source inversion needs exactly 3 frequencies, got "
            f"{frequencies.shape[0]}"
        )
    k0 = float(frequencies[0])
    for j, mult in ((1, 2.0), (2, 4.0)):
        if abs(frequencies[j] - mult * k0) > _HARMONIC_RTOL * mult * k0:
            raise DomainError(
                f"frequency {frequencies[j]} is not {mult} * k0 = {mult * k0}"
            )
    return k0


def run_algorithm1(
    measurements: MeasurementSet,
    grid: SamplingGrid,
    average_strength: bool = False,
) -> SingleSourceEstimate:
    """Full single-source pipeline: distances, strength, then grid argmax.

    The strength is taken from the first sensor as the base method prescribes;
    ``average_strength=True`` averages the closed-form inverse over all four
    sensors instead (a robustness extension, off by default).
    """
    sensors = measurements.sensors
    if sensors.dimension != 3:
        raise DomainError("single-source inversion requires 3D measurements")
    if len(sensors) != 4:
        raise DomainError(f"single-source inversion needs exactly 4 sensors, got {len(sensors)}")
    if not no_four_coplanar(sensors):
        raise GeometryError("single-source inversion requires non-coplanar sensors")
    k0 = _harmonic_triple(measurements.frequencies.values)
    u = measurements.samples
    if np.all(u == 0.0):
        raise InversionError("all field samples are zero: nothing to invert")
    distances = tuple(
        recover_distance(u[l, 0], u[l, 1], u[l, 2], k0) for l in range(4)
    )
    if average_strength:
        strength = np.mean(
            [recover_strength(u[l, 0], k0, distances[l]) for l in range(4)]
        )
    else:
        strength = recover_strength(u[0, 0], k0, distances[0])
    tau_abs = abs(strength)
    if tau_abs == 0.0:
        raise InversionError("recovered strength is zero: indicator undefined")
    field = indicator_field_single(grid, sensors, u[:, 0], k0, tau_abs)
    position = grid.nodes()[int(np.argmax(field.values))]
    return SingleSourceEstimate(
        distance_per_sensor=distances,
        strength=complex(strength),
        position=position,
        indicator_field=field,
    )


def estimate_to_report(
    estimate: SingleSourceEstimate, sensor_count: int = 4
) -> ReconstructionReport:
    """Adapt a single-source estimate to the common report shape."""
    report = ReconstructionReport(
        estimated_count=1,
        positions=estimate.position.reshape(1, 3),
        strengths=np.asarray([estimate.strength], dtype=np.complex128),
        dimension=3,
        algorithm="single3d",
        sensor_count=sensor_count,
        indicator_field=estimate.indicator_field,
        distance_sets=tuple(
            (l, (d,)) for l, d in enumerate(estimate.distance_per_sensor)
        ),
    )
    return report
