"""Sensor arrays, degeneracy predicates, and distance diagnostics.

The uniqueness theory behind the inversion algorithms needs sensors in
"general position": no three collinear in 2-D, no four coplanar in 3-D.  The
predicates here use relative tolerances (scaled by powers of the largest
pairwise distance) so they are invariant under rigid motions and scaling.

`circle_count` counts (sensor, source) pairs whose source circle through a
query point z has radius matching |sensor - z|; at a true source and generic
geometry the count equals the number of sensors, away from sources it is
bounded by 2M.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

DEFAULT_GEOMETRY_TOL = 1e-9


@dataclass(frozen=True)
class SensorArray:
    """An ordered list of measurement points in R^2 or R^3."""

    dimension: int
    points: np.ndarray

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise DomainError("SensorArray: dimension must be 2 or 3")
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise DomainError(
                f"SensorArray: points must have shape (L, {self.dimension})"
            )
        if not np.all(np.isfinite(pts)):
            raise DomainError("SensorArray: points must be finite")
        if pts.shape[0] >= 2:
            diff = pts[:, None, :] - pts[None, :, :]
            dist = np.linalg.norm(diff, axis=2)
            np.fill_diagonal(dist, np.inf)
            if dist.min() == 0.0:
                raise DomainError("SensorArray: points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def circle_array_2d(L: int, center, radius: float, phase: float = 0.0) -> SensorArray:
    """L sensors equally spaced on a circle; angles 2*pi*j/L + phase."""
    if L < 1:
        raise DomainError("circle_array_2d: L must be >= 1")
    if radius <= 0:
        raise DomainError("circle_array_2d: radius must be > 0")
    center = np.asarray(center, dtype=np.float64)
    theta = 2.0 * np.pi * np.arange(L) / L + phase
    pts = center + radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return SensorArray(2, pts)


def sphere_array_3d(L: int, center, radius: float) -> SensorArray:
    """L sensors on a sphere: theta_j = arccos(2j/L - 1), phi_j = 2*pi*j/L."""
    if L < 1:
        raise DomainError("sphere_array_3d: L must be >= 1")
    if radius <= 0:
        raise DomainError("sphere_array_3d: radius must be > 0")
    center = np.asarray(center, dtype=np.float64)
    j = np.arange(L)
    theta = np.arccos(2.0 * j / L - 1.0)
    phi = 2.0 * np.pi * j / L
    pts = center + radius * np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)],
        axis=1,
    )
    return SensorArray(3, pts)


def _max_pairwise_distance(pts: np.ndarray) -> float:
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.linalg.norm(diff, axis=2).max())


def no_three_collinear(sensors: SensorArray, tol: float = DEFAULT_GEOMETRY_TOL) -> bool:
    """True iff every sensor triple spans a genuinely 2-D triangle."""
    if sensors.dimension != 2:
        raise DomainError("no_three_collinear: 2-D sensors required")
    pts = sensors.points
    if len(sensors) < 3:
        return True
    scale = _max_pairwise_distance(pts)
    for i, j, k in itertools.combinations(range(len(sensors)), 3):
        a = pts[j] - pts[i]
        b = pts[k] - pts[i]
        cross = a[0] * b[1] - a[1] * b[0]
        if abs(cross) <= tol * scale * scale:
            return False
    return True


def no_four_coplanar(sensors: SensorArray, tol: float = DEFAULT_GEOMETRY_TOL) -> bool:
    """True iff every sensor quadruple spans a genuinely 3-D tetrahedron."""
    if sensors.dimension != 3:
        raise DomainError("no_four_coplanar: 3-D sensors required")
    pts = sensors.points
    if len(sensors) < 4:
        return True
    scale = _max_pairwise_distance(pts)
    for i, j, k, m in itertools.combinations(range(len(sensors)), 4):
        a = pts[j] - pts[i]
        b = pts[k] - pts[i]
        c = pts[m] - pts[i]
        triple = np.dot(a, np.cross(b, c))
        if abs(triple) <= tol * scale**3:
            return False
    return True


def circle_count(z, sensors: SensorArray, sources, tol: float = DEFAULT_GEOMETRY_TOL) -> int:
    """Number of (sensor, source) pairs with ||x_l - z| - |x_l - z_m|| <= tol."""
    z = np.asarray(z, dtype=np.float64)
    positions = sources.positions()
    if positions.shape[0] == 0:
        return 0
    dz = np.linalg.norm(sensors.points - z, axis=1)
    dm = np.linalg.norm(
        sensors.points[:, None, :] - positions[None, :, :], axis=2
    )
    return int(np.sum(np.abs(dz[:, None] - dm) <= tol))


def enclosing_radius(sensors: SensorArray, box_lower, box_upper) -> float:
    """Radius of the smallest origin-centered ball containing sensors and box.

    The box is axis-aligned between `box_lower` and `box_upper` (equal corners
    degenerate to a point).
    """
    lower = np.atleast_1d(np.asarray(box_lower, dtype=np.float64))
    upper = np.atleast_1d(np.asarray(box_upper, dtype=np.float64))
    if lower.shape != upper.shape or np.any(lower > upper):
        raise DomainError("enclosing_radius: invalid box")
    corners = np.array(list(itertools.product(*zip(lower, upper))))
    r_box = np.linalg.norm(corners, axis=1).max()
    r_sens = np.linalg.norm(sensors.points, axis=1).max() if len(sensors) else 0.0
    return float(max(r_box, r_sens))
