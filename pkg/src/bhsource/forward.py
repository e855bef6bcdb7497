"""Forward model: point sources, scattered-field synthesis, noise, residuals.

The scattered field of M point sources with strengths tau_m is

    u^s(x, k) = sum_m tau_m * Phi_k(x, z_m)

where Phi_k is the outgoing fundamental solution of Delta^2 u - k^4 u:

    3-D:  Phi_k(x, y) = (e^{ikr} - e^{-kr}) / (8 pi k^2 r),      r = |x - y|
    2-D:  Phi_k(x, y) = (i / (8 k^2)) * (H0^(1)(kr) + (2i/pi) K0(kr))

Every evaluation funnels through one vectorized helper so that scalar calls,
sensor synthesis and stencil evaluations agree bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import specfun
from .errors import DomainError, ConditioningError, SingularityError
from .geometry import SensorArray

DEFAULT_RESIDUAL_STEP = 1e-2


@dataclass(frozen=True)
class PointSource:
    """A point source: position z_m and complex scattering strength tau_m."""

    position: np.ndarray
    strength: complex

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64)
        if pos.ndim != 1 or pos.size not in (2, 3) or not np.all(np.isfinite(pos)):
            raise DomainError("PointSource: position must be a finite 2- or 3-vector")
        s = complex(self.strength)
        if s == 0 or not (np.isfinite(s.real) and np.isfinite(s.imag)):
            raise DomainError("PointSource: strength must be finite and nonzero")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "strength", s)


@dataclass(frozen=True)
class SourceConfig:
    """A dimension tag plus zero or more point sources."""

    dimension: int
    sources: tuple = field(default=())

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise DomainError("SourceConfig: dimension must be 2 or 3")
        srcs = tuple(self.sources)
        for s in srcs:
            if s.position.size != self.dimension:
                raise DomainError("SourceConfig: source dimension mismatch")
        pos = np.array([s.position for s in srcs]) if srcs else np.empty((0, self.dimension))
        if len(srcs) >= 2:
            diff = pos[:, None, :] - pos[None, :, :]
            dist = np.linalg.norm(diff, axis=2)
            np.fill_diagonal(dist, np.inf)
            if dist.min() == 0.0:
                raise DomainError("SourceConfig: source positions must be distinct")
        object.__setattr__(self, "sources", srcs)

    def __len__(self) -> int:
        return len(self.sources)

    def positions(self) -> np.ndarray:
        if not self.sources:
            return np.empty((0, self.dimension))
        return np.array([s.position for s in self.sources])

    def strengths(self) -> np.ndarray:
        return np.array([s.strength for s in self.sources], dtype=np.complex128)


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing positive wave numbers."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=np.float64))
        if v.size == 0 or not np.all(np.isfinite(v)) or v[0] <= 0:
            raise DomainError("FrequencyGrid: values must be finite and > 0")
        if v.size >= 2 and not np.all(np.diff(v) > 0):
            raise DomainError("FrequencyGrid: values must be strictly increasing")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MeasurementSet:
    """Complex scattered-field samples, shape (sensors, frequencies)."""

    sensors: SensorArray
    frequencies: FrequencyGrid
    samples: np.ndarray
    noise_level: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        expected = (len(self.sensors), len(self.frequencies))
        if s.shape != expected:
            raise DomainError(f"MeasurementSet: samples must have shape {expected}")
        if self.noise_level < 0:
            raise DomainError("MeasurementSet: noise_level must be >= 0")
        object.__setattr__(self, "samples", s)


def _field_matrix(config: SourceConfig, points: np.ndarray, k: np.ndarray) -> np.ndarray:
    """u^s at each (point, frequency); the single evaluation path.

    points: (P, dim); k: (J,) -> complex (P, J).
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    k = np.atleast_1d(np.asarray(k, dtype=np.float64))
    if np.any(k <= 0) or not np.all(np.isfinite(k)):
        raise DomainError("wave numbers must be finite and > 0")
    out = np.zeros((points.shape[0], k.size), dtype=np.complex128)
    if len(config) == 0:
        return out
    dists = np.linalg.norm(
        points[:, None, :] - config.positions()[None, :, :], axis=2
    )
    bad = np.argwhere(dists == 0.0)
    if bad.size:
        p, m = bad[0]
        raise SingularityError(
            f"evaluation point {p} coincides with source {m}; "
            "the fundamental solution is singular there"
        )
    k2 = k * k
    for m, source in enumerate(config.sources):
        kr = dists[:, m, None] * k[None, :]
        if config.dimension == 3:
            phi = (np.exp(1j * kr) - np.exp(-kr)) / (
                8.0 * np.pi * k2[None, :] * dists[:, m, None]
            )
        else:
            h0 = specfun.hankel1_0(kr)
            kk0 = specfun.macdonald_k0(kr)
            phi = (1j / (8.0 * k2[None, :])) * (h0 + (2j / np.pi) * kk0)
        out += source.strength * phi
    return out


def fundamental_solution(k: float, x, y, dimension: int) -> complex:
    """Outgoing fundamental solution Phi_k(x, y) in the given dimension."""
    unit = SourceConfig(
        dimension, (PointSource(np.asarray(y, dtype=np.float64), 1.0 + 0.0j),)
    )
    return complex(_field_matrix(unit, np.asarray(x, dtype=np.float64)[None, :], np.array([k]))[0, 0])


def scattered_field(config: SourceConfig, x, k: float) -> complex:
    """u^s(x, k) = sum_m tau_m Phi_k(x, z_m)."""
    return complex(
        _field_matrix(config, np.asarray(x, dtype=np.float64)[None, :], np.array([k]))[0, 0]
    )


def noise_matrix(seed: int, L: int, J: int) -> np.ndarray:
    """Deterministic uniform[-1,1] draws, one independent stream per sensor.

    Row l comes from a counter-based Philox generator keyed (seed, l), so the
    draws are reproducible across platforms, independent across sensors, and
    stable under adding/removing other sensors.
    """
    if seed < 0:
        raise DomainError("noise_matrix: seed must be a nonnegative integer")
    out = np.empty((L, J), dtype=np.float64)
    for l in range(L):
        gen = np.random.Generator(
            np.random.Philox(key=np.array([seed, l], dtype=np.uint64))
        )
        out[l] = gen.uniform(-1.0, 1.0, J)
    return out


def synthesize_measurements(
    config: SourceConfig,
    sensors: SensorArray,
    freqs: FrequencyGrid,
    noise_level: float = 0.0,
    seed: int = 0,
) -> MeasurementSet:
    """Exact scattered-field samples, optionally with multiplicative noise.

    samples[l, j] = u^s(x_l, k_j) * (1 + noise_level * N[l, j]) with N drawn
    uniformly from [-1, 1] per (sensor, frequency).
    """
    if sensors.dimension != config.dimension:
        raise DomainError("synthesize_measurements: sensor/source dimension mismatch")
    if noise_level < 0:
        raise DomainError("synthesize_measurements: noise_level must be >= 0")
    clean = _field_matrix(config, sensors.points, freqs.values)
    if noise_level > 0:
        clean = clean * (
            1.0 + noise_level * noise_matrix(seed, clean.shape[0], clean.shape[1])
        )
    return MeasurementSet(sensors, freqs, clean, float(noise_level), int(seed))


# Composite biharmonic stencils (two nested second-order Laplacians), O(h^2).
_STENCIL_2D = (
    ((0, 0), 20.0),
    ((1, 0), -8.0), ((-1, 0), -8.0), ((0, 1), -8.0), ((0, -1), -8.0),
    ((1, 1), 2.0), ((1, -1), 2.0), ((-1, 1), 2.0), ((-1, -1), 2.0),
    ((2, 0), 1.0), ((-2, 0), 1.0), ((0, 2), 1.0), ((0, -2), 1.0),
)

_STENCIL_3D = (
    ((0, 0, 0), 42.0),
    ((1, 0, 0), -12.0), ((-1, 0, 0), -12.0),
    ((0, 1, 0), -12.0), ((0, -1, 0), -12.0),
    ((0, 0, 1), -12.0), ((0, 0, -1), -12.0),
    ((1, 1, 0), 2.0), ((1, -1, 0), 2.0), ((-1, 1, 0), 2.0), ((-1, -1, 0), 2.0),
    ((1, 0, 1), 2.0), ((1, 0, -1), 2.0), ((-1, 0, 1), 2.0), ((-1, 0, -1), 2.0),
    ((0, 1, 1), 2.0), ((0, 1, -1), 2.0), ((0, -1, 1), 2.0), ((0, -1, -1), 2.0),
    ((2, 0, 0), 1.0), ((-2, 0, 0), 1.0),
    ((0, 2, 0), 1.0), ((0, -2, 0), 1.0),
    ((0, 0, 2), 1.0), ((0, 0, -2), 1.0),
)


def pde_residual(
    config: SourceConfig, x, k: float, h: float = DEFAULT_RESIDUAL_STEP
) -> float:
    """|Delta^2 u^s - k^4 u^s| at x by central differences with step h.

    Uses the 13-point (2-D) / 25-point (3-D) composite biharmonic stencil;
    truncation error is O(h^2).  Requires x to keep distance > 10 h from all
    sources so the stencil does not straddle a singularity.
    """
    x = np.asarray(x, dtype=np.float64)
    if h <= 0:
        raise DomainError("pde_residual: step h must be > 0")
    if len(config) == 0:
        return 0.0
    gap = np.linalg.norm(config.positions() - x, axis=1).min()
    if gap <= 10.0 * h:
        raise ConditioningError(
            f"pde_residual: x within 10 h of a source (gap {gap:.3g}, h {h:.3g}); "
            "stencil would be dominated by the singularity"
        )
    stencil = _STENCIL_2D if config.dimension == 2 else _STENCIL_3D
    offsets = np.array([o for o, _ in stencil], dtype=np.float64)
    weights = np.array([w for _, w in stencil])
    pts = x[None, :] + h * offsets
    u = _field_matrix(config, pts, np.array([k]))[:, 0]
    bilap = np.sum(weights * u) / h**4
    center = u[0]
    return float(abs(bilap - k**4 * center))
