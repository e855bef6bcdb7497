"""Reconstruction results and their serialized report format.

A :class:`ReconstructionReport` is the common output of every inversion
driver.  :func:`attach_truth` adds per-source error columns by nearest-true
matching (used for reporting only), and :func:`render_report` produces the
deterministic, machine-parseable text report written by the CLI.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import DomainError
from .forward import SourceConfig

_FMT = "%.12g"


def _fmt_real(x: float) -> str:
    return _FMT % float(x)


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 or z.imag != z.imag else "-"
    return f"{_fmt_real(z.real)} {sign} {_fmt_real(abs(z.imag))}i"


def _fmt_point(p) -> str:
    return " ".join(_fmt_real(c) for c in np.asarray(p, dtype=np.float64).reshape(-1))


@dataclasses.dataclass
class ReconstructionReport:
    """Estimated sources plus optional per-source errors against a known truth.

    ``positions`` is ``(P, dim)`` and may be empty (grid-free runs report
    distance sets instead).  ``position_errors``/``strength_errors`` are
    present iff ground truth was attached.  ``runtime_seconds`` is kept
    in-memory for benchmarking and deliberately excluded from serialized
    reports, which must be byte-reproducible.
    """

    estimated_count: int
    positions: np.ndarray
    strengths: np.ndarray
    dimension: int
    algorithm: str
    position_errors: np.ndarray | None = None
    strength_errors: np.ndarray | None = None
    matched_truth_indices: np.ndarray | None = None
    runtime_seconds: float = 0.0
    sensor_count: int = 0
    distance_sets: tuple = ()
    notes: tuple = ()
    indicator_field: object = None
    node_sets: object = None

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(
            -1, self.dimension if self.dimension else 1
        )
        self.strengths = np.asarray(self.strengths, dtype=np.complex128).reshape(-1)

    @property
    def sensor_count_sufficient(self) -> bool | None:
        """Whether L >= 4*M_hat - 1 for the inferred source count (2D/3D bands)."""
        if self.sensor_count <= 0 or self.estimated_count <= 0:
            return None
        return self.sensor_count >= 4 * self.estimated_count - 1


def attach_truth(report: ReconstructionReport, truth: SourceConfig) -> ReconstructionReport:
    """Fill in per-source errors by matching each estimate to its nearest true source."""
    if truth.dimension != report.dimension:
        raise DomainError(
            f"truth dimension {truth.dimension} does not match report dimension "
            f"{report.dimension}"
        )
    if report.positions.shape[0] == 0:
        report.position_errors = np.empty(0)
        report.strength_errors = np.empty(0)
        report.matched_truth_indices = np.empty(0, dtype=np.int64)
        return report
    true_pos = truth.positions()
    true_tau = truth.strengths()
    diffs = report.positions[:, None, :] - true_pos[None, :, :]
    dists = np.linalg.norm(diffs, axis=2)
    nearest = np.argmin(dists, axis=1)
    report.matched_truth_indices = nearest.astype(np.int64)
    report.position_errors = dists[np.arange(dists.shape[0]), nearest]
    report.strength_errors = np.abs(report.strengths - true_tau[nearest])
    return report


def render_report(
    report: ReconstructionReport,
    config_echo: list,
    truth: SourceConfig | None = None,
) -> str:
    """Render the deterministic text report.

    ``config_echo`` is a list of ``(key, value)`` string pairs describing the
    resolved experiment configuration; it is echoed verbatim so every report
    records the exact settings that produced it.
    """
    lines: list = ["[config]"]
    for key, value in config_echo:
        lines.append(f"{key} = {value}")
    lines.append("")
    lines.append("[result]")
    lines.append(f"algorithm = {report.algorithm}")
    lines.append(f"estimated_count = {report.estimated_count}")
    for i in range(report.positions.shape[0]):
        lines.append(f"position_{i + 1} = {_fmt_point(report.positions[i])}")
    for i, tau in enumerate(report.strengths):
        lines.append(f"strength_{i + 1} = {_fmt_complex(tau)}")
    sufficient = report.sensor_count_sufficient
    if sufficient is not None:
        need = 4 * report.estimated_count - 1
        verdict = "yes" if sufficient else "no"
        lines.append(
            f"sensor_count_sufficient = {verdict} "
            f"(L = {report.sensor_count}, required 4*M - 1 = {need})"
        )
    for note in report.notes:
        lines.append(f"note = {note}")
    for sensor_index, distances in report.distance_sets:
        lines.append(
            f"distances_sensor_{sensor_index} = "
            + " ".join(_fmt_real(d) for d in distances)
        )
    if report.position_errors is not None and report.strength_errors is not None:
        lines.append("")
        lines.append("[errors]")
        for i in range(len(report.position_errors)):
            matched = (
                int(report.matched_truth_indices[i]) + 1
                if report.matched_truth_indices is not None
                else 0
            )
            lines.append(
                f"source_{i + 1} = matched_true_{matched} "
                f"position_error {_fmt_real(report.position_errors[i])} "
                f"strength_error {_fmt_real(report.strength_errors[i])}"
            )
    if truth is not None:
        lines.append("")
        lines.append("[table]")
        lines.append("# m | true strength | recovered strength | recovered position")
        true_tau = truth.strengths()
        recovered_by_truth: dict = {}
        if report.matched_truth_indices is not None:
            for est_i, true_i in enumerate(report.matched_truth_indices):
                recovered_by_truth.setdefault(int(true_i), est_i)
        for m in range(len(true_tau)):
            est_i = recovered_by_truth.get(m)
            if est_i is None:
                lines.append(f"{m + 1} | {_fmt_complex(true_tau[m])} | (not recovered) |")
            else:
                lines.append(
                    f"{m + 1} | {_fmt_complex(true_tau[m])} | "
                    f"{_fmt_complex(report.strengths[est_i])} | "
                    f"{_fmt_point(report.positions[est_i])}"
                )
    return "\n".join(lines) + "\n"


def write_report(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
