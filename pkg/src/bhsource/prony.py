"""Finite-frequency 3D identification via annihilating-filter node recovery.

At harmonically spaced frequencies ``k_j = j*k0`` the rescaled samples

    v_j = 8 pi k_j^2 u(x, k_j) = sum_m (tau_m / r_m) (xi_m^j - eta_m^j)

are an exponential sum in the nodes ``xi_m = e^{i k0 r_m}`` (unit modulus) and
``eta_m = e^{-k0 r_m}`` (inside the unit disk).  A Hankel matrix built from the
``v_j`` therefore has even numerical rank ``2 M*``, its null vector is an
annihilating polynomial whose roots are the nodes, and distances follow from
``eta`` (cross-checked against ``arg(xi)``).  Strengths solve a Vandermonde
least-squares system whose leading equation encodes ``v_0 = 0``.
"""

from __future__ import annotations

import dataclasses
import math
import time
import warnings

import numpy as np

from . import multi3d
from .errors import (
    AmbiguityError,
    ConditioningError,
    DegenerateDataError,
    DomainError,
    GeometryError,
)
from .forward import MeasurementSet
from .geometry import no_four_coplanar
from .report import ReconstructionReport
from .sampling import DEFAULT_REL_THRESHOLD, SamplingGrid, extract_peaks

#: Singular values below RANK_TOL * sigma_1 are treated as zero.
DEFAULT_RANK_TOL = 1e-8

#: Root classification tolerance: |.|==1 within TOL_MOD -> oscillatory node.
DEFAULT_TOL_MOD = 1e-3

#: Vandermonde condition numbers above this abort strength recovery.
CONDITION_LIMIT = 1e12

_HARMONIC_RTOL = 1e-9


@dataclasses.dataclass(frozen=True)
class HarmonicData:
    """Rescaled single-sensor samples on the harmonic grid ``k_j = j*k0``."""

    k0: float
    values: np.ndarray

    def __post_init__(self) -> None:
        k0 = float(self.k0)
        if not math.isfinite(k0) or k0 <= 0.0:
            raise DomainError(f"k0 must be positive, got {k0}")
        values = np.ascontiguousarray(
            np.asarray(self.values, dtype=np.complex128).reshape(-1)
        )
        if values.size == 0:
            raise DomainError("harmonic data must contain at least one sample")
        if not np.all(np.isfinite(values)):
            raise DomainError("harmonic data must be finite")
        object.__setattr__(self, "k0", k0)
        object.__setattr__(self, "values", values)

    @property
    def count(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_measurements(
        cls, measurements: MeasurementSet, sensor_index: int
    ) -> "HarmonicData":
        """Extract one sensor's rescaled samples, validating the harmonic grid."""
        sensor_index = int(sensor_index)
        if not 0 <= sensor_index < len(measurements.sensors):
            raise DomainError(f"sensor_index {sensor_index} out of range")
        k = measurements.frequencies.values
        k0 = float(k[0])
        expected = k0 * np.arange(1, k.size + 1)
        if np.any(np.abs(k - expected) > _HARMONIC_RTOL * expected):
            raise DomainError(
                "frequencies are not harmonically spaced multiples of the "
                f"lowest frequency {k0}"
            )
        u = measurements.samples[sensor_index]
        return cls(k0=k0, values=8.0 * np.pi * k**2 * u)


@dataclasses.dataclass(frozen=True)
class NodeSet:
    """Recovered node pairs for one sensor, sorted by ascending distance."""

    xi: np.ndarray
    eta: np.ndarray
    distances: np.ndarray

    def __post_init__(self) -> None:
        xi = np.asarray(self.xi, dtype=np.complex128).reshape(-1)
        eta = np.asarray(self.eta, dtype=np.complex128).reshape(-1)
        distances = np.asarray(self.distances, dtype=np.float64).reshape(-1)
        if not (xi.size == eta.size == distances.size):
            raise DomainError("xi, eta, and distances must have equal lengths")
        if distances.size:
            if np.any(distances <= 0.0):
                raise DomainError("recovered distances must be positive")
            if np.any(np.diff(distances) <= 0.0):
                raise DomainError("recovered distances must be strictly increasing")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "distances", distances)

    def __len__(self) -> int:
        return int(self.distances.size)


def build_data_matrix(data: HarmonicData, M: int) -> np.ndarray:
    """Hankel matrix of rescaled samples, shape ``(J - 2M, 2M + 1)``."""
    M = int(M)
    if M < 0:
        raise DomainError(f"source bound must be nonnegative, got {M}")
    J = data.count
    if J <= 4 * M:
        raise DomainError(
            f"need more than 4M = {4 * M} frequencies to bound {M} sources, got {J}"
        )
    rows = J - 2 * M
    cols = 2 * M + 1
    v = data.values
    idx = np.arange(rows)[:, None] + np.arange(cols)[None, :]
    return np.ascontiguousarray(v[idx])


def numerical_rank(matrix: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values above ``rank_tol`` times the largest."""
    sigma = np.linalg.svd(np.asarray(matrix, dtype=np.complex128), compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rank_tol * sigma[0]))


def _classify_roots(roots: np.ndarray, tol_mod: float) -> tuple:
    """Split polynomial roots into oscillatory / decaying / spurious groups."""
    xi = []
    eta = []
    for theta in roots:
        modulus = abs(theta)
        if abs(modulus - 1.0) <= tol_mod:
            xi.append(theta)
        elif (
            modulus < 1.0 - tol_mod
            and abs(theta.imag) <= tol_mod
            and theta.real > 0.0
        ):
            eta.append(complex(theta.real, 0.0))
        # anything else is a spurious root and is discarded
    return np.asarray(xi, dtype=np.complex128), np.asarray(eta, dtype=np.complex128)


def recover_nodes(
    data: HarmonicData,
    M: int,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol_mod: float = DEFAULT_TOL_MOD,
) -> NodeSet:
    """Recover the node pairs visible at one sensor.

    Estimates ``M*`` from the numerical rank of the bound-``M`` Hankel matrix,
    re-builds the tighter ``(J - 2M*) x (2M* + 1)`` block, takes its least
    singular vector as an annihilating polynomial, and classifies its roots.
    Distances come from the decaying nodes; the oscillatory nodes provide an
    independent cross-check that also detects phase-wrap ambiguity when
    ``k0 * r`` exceeds ``pi``.
    """
    U = build_data_matrix(data, M)
    rank = numerical_rank(U, rank_tol)
    if rank == 0:
        empty = np.empty(0, dtype=np.complex128)
        return NodeSet(xi=empty, eta=empty, distances=np.empty(0))
    if rank % 2 == 1:
        raise DegenerateDataError(
            f"numerical rank {rank} is odd; node pairs cannot be formed"
        )
    m_star = rank // 2
    if data.count <= 4 * m_star:
        raise DegenerateDataError(
            f"estimated {m_star} sources need more than {4 * m_star} "
            f"frequencies, have {data.count}"
        )
    H = build_data_matrix(data, m_star)
    _, _, vh = np.linalg.svd(H)
    annihilator = vh[-1].conj()
    roots = np.roots(annihilator[::-1])
    xi, eta = _classify_roots(roots, tol_mod)
    if xi.size != m_star or eta.size != m_star:
        raise DegenerateDataError(
            f"node classification inconsistent: rank suggests {m_star} pairs "
            f"but found {xi.size} oscillatory and {eta.size} decaying roots"
        )
    order = np.argsort(-eta.real)
    eta = eta[order]
    distances = -np.log(eta.real) / data.k0

    args = np.angle(xi)
    if np.any(args <= 0.0):
        raise AmbiguityError(
            "an oscillatory node has non-positive phase: k0 exceeds the "
            "admissible pi/(2R) bound and distances are phase-wrapped"
        )
    xi_distances = np.sort(args) / data.k0
    cross_tol = max(20.0 * tol_mod, 1e-8) / data.k0
    if np.any(np.abs(xi_distances - distances) > cross_tol):
        if data.k0 * float(distances.max()) > np.pi:
            raise AmbiguityError(
                "oscillatory and decaying node distances disagree and "
                "k0 * r exceeds pi: phase-wrap ambiguity"
            )
        raise DegenerateDataError(
            "oscillatory and decaying node distances disagree: "
            f"{xi_distances} vs {distances}"
        )
    xi = xi[np.argsort(args)]
    if data.k0 * float(distances.max()) > 0.5 * np.pi:
        warnings.warn(
            "k0 * max(distance) exceeds pi/2: the admissibility bound is "
            "violated, results may be phase-wrapped",
            RuntimeWarning,
            stacklevel=2,
        )
    return NodeSet(xi=xi, eta=eta, distances=distances)


def recover_strengths_vandermonde(data: HarmonicData, distances) -> np.ndarray:
    """Solve the Vandermonde system for strengths given known distances.

    Builds nodes from the distances, forms the ``(J + 1) x 2M`` Vandermonde
    matrix whose leading row encodes the analytic ``v_0 = 0`` limit, solves in
    the least-squares sense, and averages the two redundant strength copies.
    """
    distances = np.asarray(distances, dtype=np.float64).reshape(-1)
    M = distances.size
    if M == 0:
        return np.empty(0, dtype=np.complex128)
    if np.any(distances <= 0.0):
        raise DomainError("distances must be positive")
    gaps = np.abs(distances[:, None] - distances[None, :])
    min_gap = gaps[~np.eye(M, dtype=bool)].min() if M > 1 else np.inf
    if M > 1 and min_gap <= 1e-12 * distances.max():
        raise DomainError("distances must be pairwise distinct")
    J = data.count
    xi = np.exp(1.0j * data.k0 * distances)
    eta = np.exp(-data.k0 * distances)
    powers = np.arange(J + 1)[:, None]
    V = np.concatenate(
        [xi[None, :] ** powers, eta[None, :] ** powers], axis=1
    ).astype(np.complex128)
    condition = float(np.linalg.cond(V))
    if not math.isfinite(condition) or condition > CONDITION_LIMIT:
        raise ConditioningError(
            f"Vandermonde condition number {condition:.3e} exceeds "
            f"{CONDITION_LIMIT:.0e}; distances too close or band too short"
        )
    rhs = np.concatenate([[0.0 + 0.0j], data.values])
    coeffs, *_ = np.linalg.lstsq(V, rhs, rcond=None)
    tau_star = 0.5 * (coeffs[:M] - coeffs[M:])
    return tau_star * distances


def _best_sensor(node_sets: dict) -> int | None:
    """Most informative sensor: max node count, then max min-gap, then index."""
    best = None
    best_key = None
    for sensor_index in sorted(node_sets):
        nodes = node_sets[sensor_index]
        count = len(nodes)
        if count == 0:
            continue
        if count > 1:
            min_gap = float(np.diff(nodes.distances).min())
        else:
            min_gap = np.inf
        key = (count, min_gap, -sensor_index)
        if best_key is None or key > best_key:
            best_key = key
            best = sensor_index
    return best


def run_finite_freq_3d(
    measurements: MeasurementSet,
    m_bound: int,
    grid: SamplingGrid | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
    tol_mod: float = DEFAULT_TOL_MOD,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
    min_separation: float | None = None,
) -> ReconstructionReport:
    """Finite-frequency pipeline over all sensors.

    Node sets are recovered per sensor (sensors with degenerate data are
    skipped with a note).  Strengths come from the sensor with the most — and
    best-separated — recovered nodes.  With a sampling grid, positions are the
    band-indicator peaks; grid-free runs report per-sensor distance sets only.
    """
    sensors = measurements.sensors
    if sensors.dimension != 3:
        raise DomainError("finite-frequency inversion requires 3D measurements")
    if not no_four_coplanar(sensors):
        raise GeometryError("finite-frequency inversion requires non-coplanar sensors")
    started = time.perf_counter()
    notes = []
    node_sets: dict = {}
    for l in range(len(sensors)):
        data = HarmonicData.from_measurements(measurements, l)
        try:
            node_sets[l] = recover_nodes(data, m_bound, rank_tol=rank_tol, tol_mod=tol_mod)
        except (DegenerateDataError, AmbiguityError) as exc:
            notes.append(f"sensor {l} skipped: {exc}")
    best = _best_sensor(node_sets)
    if best is None:
        report = ReconstructionReport(
            estimated_count=0,
            positions=np.empty((0, 3)),
            strengths=np.empty(0, dtype=np.complex128),
            dimension=3,
            algorithm="prony3d",
            sensor_count=len(sensors),
            notes=tuple(notes) + ("no sensor produced a usable node set",),
            node_sets=node_sets,
        )
        report.runtime_seconds = time.perf_counter() - started
        return report
    best_nodes = node_sets[best]
    best_data = HarmonicData.from_measurements(measurements, best)
    strengths = recover_strengths_vandermonde(best_data, best_nodes.distances)
    notes.append(f"strengths recovered at sensor {best}")
    distance_sets = tuple(
        (l, tuple(float(d) for d in node_sets[l].distances)) for l in sorted(node_sets)
    )

    if grid is None:
        report = ReconstructionReport(
            estimated_count=len(best_nodes),
            positions=np.empty((0, 3)),
            strengths=strengths,
            dimension=3,
            algorithm="prony3d",
            sensor_count=len(sensors),
            distance_sets=distance_sets,
            notes=tuple(notes),
            node_sets=node_sets,
        )
        report.runtime_seconds = time.perf_counter() - started
        return report

    field = multi3d.indicator_field_3d(measurements, grid)
    peaks = extract_peaks(field, rel_threshold=rel_threshold, min_separation=min_separation)
    positions = peaks.positions
    # Pair each peak with the best sensor's nearest recovered distance.
    x_best = sensors.points[best]
    peak_strengths = np.empty(len(peaks), dtype=np.complex128)
    for i in range(len(peaks)):
        r_peak = float(np.linalg.norm(positions[i] - x_best))
        nearest = int(np.argmin(np.abs(best_nodes.distances - r_peak)))
        peak_strengths[i] = strengths[nearest]
    report = ReconstructionReport(
        estimated_count=len(peaks),
        positions=positions,
        strengths=peak_strengths,
        dimension=3,
        algorithm="prony3d",
        sensor_count=len(sensors),
        distance_sets=distance_sets,
        notes=tuple(notes),
        indicator_field=field,
        node_sets=node_sets,
    )
    report.runtime_seconds = time.perf_counter() - started
    return report


def node_sets_to_csv(path, node_sets: dict) -> None:
    """Diagnostic dump: ``sensor_index,node_type,value_re,value_im,distance``."""
    lines = ["sensor_index,node_type,value_re,value_im,distance"]
    for sensor_index in sorted(node_sets):
        nodes = node_sets[sensor_index]
        for m in range(len(nodes)):
            d = repr(float(nodes.distances[m]))
            for label, value in (("xi", nodes.xi[m]), ("eta", nodes.eta[m])):
                lines.append(
                    f"{sensor_index},{label},{repr(float(value.real))},"
                    f"{repr(float(value.imag))},{d}"
                )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
