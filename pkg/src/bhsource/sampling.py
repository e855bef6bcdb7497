"""Rectangular sampling grids, indicator-field evaluation, and peak extraction.

The localization algorithms in this package all end the same way: evaluate a
nonnegative indicator functional on a rectangular grid and treat well-separated
local maxima as estimated source positions.  This module owns that machinery.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Sequence

import numpy as np

from .errors import DataFormatError, DomainError, EvaluationError

#: Fraction of the global maximum below which local maxima are ignored.
DEFAULT_REL_THRESHOLD = 0.5

#: Default peak separation, in units of the grid spacing.
DEFAULT_SEPARATION_FACTOR = 3.0

# Tolerance (relative to the spacing) for "spacing divides the extent".
_EXTENT_TOL = 1e-6


@dataclasses.dataclass(frozen=True)
class SamplingGrid:
    """Axis-aligned rectangular grid with uniform spacing on every axis.

    Nodes along axis ``d`` are ``lower[d] + i*spacing`` for
    ``i = 0 .. axis_counts[d]-1``; the last node reproduces ``upper[d]`` up to
    floating-point rounding.
    """

    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    spacing: float

    def __post_init__(self) -> None:
        if self.dimension not in (2, 3):
            raise DomainError(f"grid dimension must be 2 or 3, got {self.dimension}")
        lower = np.ascontiguousarray(np.asarray(self.lower, dtype=np.float64))
        upper = np.ascontiguousarray(np.asarray(self.upper, dtype=np.float64))
        if lower.shape != (self.dimension,) or upper.shape != (self.dimension,):
            raise DomainError(
                "grid bounds must be vectors of length "
                f"{self.dimension}, got shapes {lower.shape} and {upper.shape}"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise DomainError("grid bounds must be finite")
        if not np.all(upper > lower):
            raise DomainError("grid upper bound must exceed lower bound on every axis")
        spacing = float(self.spacing)
        if not np.isfinite(spacing) or spacing <= 0.0:
            raise DomainError(f"grid spacing must be positive, got {spacing}")
        counts = []
        for d in range(self.dimension):
            extent = upper[d] - lower[d]
            n = int(round(extent / spacing)) + 1
            if n < 2 or abs(lower[d] + (n - 1) * spacing - upper[d]) > _EXTENT_TOL * spacing:
                raise DomainError(
                    f"spacing {spacing} does not divide the extent {extent} on axis {d}"
                )
            counts.append(n)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "_axis_counts", tuple(counts))

    @property
    def axis_counts(self) -> tuple:
        """Number of nodes along each axis."""
        return self._axis_counts

    @property
    def node_count(self) -> int:
        return int(np.prod(self._axis_counts))

    def axes(self) -> list:
        """Per-axis node coordinates."""
        return [
            self.lower[d] + self.spacing * np.arange(self._axis_counts[d], dtype=np.float64)
            for d in range(self.dimension)
        ]

    def nodes(self) -> np.ndarray:
        """All grid nodes as an ``(N, dimension)`` array, row-major in axis order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.ascontiguousarray(
            np.stack([m.reshape(-1) for m in mesh], axis=1)
        )

    def __len__(self) -> int:
        return self.node_count


@dataclasses.dataclass(frozen=True)
class IndicatorField:
    """Nonnegative indicator values sampled on a :class:`SamplingGrid`."""

    grid: SamplingGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64)).reshape(-1)
        if values.shape[0] != self.grid.node_count:
            raise DomainError(
                f"field has {values.shape[0]} values but the grid has "
                f"{self.grid.node_count} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("indicator values must be finite")
        if np.any(values < 0.0):
            raise DomainError("indicator values must be nonnegative")
        object.__setattr__(self, "values", values)

    def reshaped(self) -> np.ndarray:
        """Values as an array indexed by per-axis node indices."""
        return self.values.reshape(self.grid.axis_counts)

    def to_csv(self, path) -> None:
        """Write ``x[,y[,z]],value`` rows, one per node, row-major in axis order."""
        names = ("x", "y", "z")[: self.grid.dimension]
        header = ",".join(names) + ",value"
        nodes = self.grid.nodes()
        lines = [header]
        for row, value in zip(nodes, self.values):
            coords = ",".join(repr(float(c)) for c in row)
            lines.append(f"{coords},{repr(float(value))}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def field_from_csv(path) -> tuple:
    """Read back a field CSV as ``(node_array, value_array)``.

    The grid itself is not reconstructed; this is a diagnostic reader used by
    tests and external tooling.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        columns = header.split(",")
        if columns[-1] != "value" or columns[:-1] not in (["x", "y"], ["x", "y", "z"]):
            raise DataFormatError(f"unrecognized field CSV header: {header!r}")
        body = np.loadtxt(fh, delimiter=",", ndmin=2, dtype=np.float64)
    if body.shape[1] != len(columns):
        raise DataFormatError(
            f"field CSV rows have {body.shape[1]} columns, header names {len(columns)}"
        )
    return body[:, :-1], body[:, -1]


@dataclasses.dataclass(frozen=True)
class PeakSet:
    """Grid nodes accepted as peaks, sorted by descending height."""

    positions: np.ndarray
    heights: np.ndarray

    def __post_init__(self) -> None:
        positions = np.ascontiguousarray(np.asarray(self.positions, dtype=np.float64))
        heights = np.ascontiguousarray(np.asarray(self.heights, dtype=np.float64)).reshape(-1)
        if positions.ndim != 2 or positions.shape[0] != heights.shape[0]:
            raise DomainError("peak positions and heights must have matching lengths")
        if heights.size and np.any(np.diff(heights) > 0.0):
            raise DomainError("peak heights must be sorted in descending order")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "heights", heights)

    def __len__(self) -> int:
        return int(self.heights.shape[0])


def evaluate_field(
    grid: SamplingGrid,
    indicator: Callable,
    vectorized: bool = False,
) -> IndicatorField:
    """Evaluate ``indicator`` at every grid node.

    With ``vectorized=True`` the callable receives the full ``(N, dim)`` node
    array and must return ``N`` values; otherwise it is called once per node.
    The result is independent of evaluation order by construction.
    """
    nodes = grid.nodes()
    if vectorized:
        values = np.asarray(indicator(nodes), dtype=np.float64).reshape(-1)
        if values.shape[0] != nodes.shape[0]:
            raise EvaluationError(
                f"vectorized indicator returned {values.shape[0]} values "
                f"for {nodes.shape[0]} nodes"
            )
    else:
        values = np.fromiter(
            (float(indicator(node)) for node in nodes),
            dtype=np.float64,
            count=nodes.shape[0],
        )
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise EvaluationError(
            f"indicator returned a non-finite value {values[i]} at node "
            f"{i} = {tuple(float(c) for c in nodes[i])}"
        )
    return IndicatorField(grid, values)


def _strict_local_maxima(arr: np.ndarray) -> np.ndarray:
    """Boolean mask of nodes strictly greater than every axis neighbor."""
    mask = np.ones(arr.shape, dtype=bool)
    for ax in range(arr.ndim):
        ahead = np.full_like(arr, -np.inf)
        behind = np.full_like(arr, -np.inf)
        src = [slice(None)] * arr.ndim
        dst = [slice(None)] * arr.ndim
        src[ax] = slice(1, None)
        dst[ax] = slice(None, -1)
        ahead[tuple(dst)] = arr[tuple(src)]
        behind[tuple(src)] = arr[tuple(dst)]
        mask &= (arr > ahead) & (arr > behind)
    return mask


def extract_peaks(
    field: IndicatorField,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
    min_separation: float | None = None,
) -> PeakSet:
    """Extract well-separated strict local maxima of an indicator field.

    A node qualifies if it strictly exceeds all of its axis neighbors and its
    value is at least ``rel_threshold`` times the global maximum.  Qualifying
    nodes are then accepted greedily in descending value order (ties broken by
    node index), skipping any node within ``min_separation`` of an accepted
    peak.  ``min_separation`` defaults to three grid spacings.
    """
    rel_threshold = float(rel_threshold)
    if not 0.0 < rel_threshold < 1.0:
        raise DomainError(f"rel_threshold must lie in (0, 1), got {rel_threshold}")
    grid = field.grid
    if min_separation is None:
        min_separation = DEFAULT_SEPARATION_FACTOR * grid.spacing
    min_separation = float(min_separation)
    if not np.isfinite(min_separation) or min_separation < 0.0:
        raise DomainError(f"min_separation must be nonnegative, got {min_separation}")

    arr = field.reshaped()
    peak_mask = _strict_local_maxima(arr)
    global_max = float(field.values.max(initial=0.0))
    peak_mask &= arr >= rel_threshold * global_max
    flat_idx = np.flatnonzero(peak_mask.reshape(-1))
    if flat_idx.size == 0:
        return PeakSet(np.empty((0, grid.dimension)), np.empty(0))

    candidate_values = field.values[flat_idx]
    order = np.lexsort((flat_idx, -candidate_values))
    nodes = grid.nodes()

    accepted_pos: list = []
    accepted_val: list = []
    for i in order:
        pos = nodes[flat_idx[i]]
        if accepted_pos:
            dists = np.linalg.norm(np.asarray(accepted_pos) - pos, axis=1)
            if np.any(dists < min_separation):
                continue
        accepted_pos.append(pos)
        accepted_val.append(candidate_values[i])
    return PeakSet(np.asarray(accepted_pos), np.asarray(accepted_val))
