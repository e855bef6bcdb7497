"""Command-line experiment runner.

Subcommands:

``synthesize CONFIG``
    Evaluate the forward model for the configured sources/sensors/frequencies
    (with the configured multiplicative noise) and write
    ``<name>.measurements.csv`` with columns ``sensor_index,k,re,im``.

``invert CONFIG [--data FILE]``
    Run the configured inversion algorithm.  Measurements are synthesized
    from the config unless ``--data`` supplies a measurement CSV (same format
    as ``synthesize`` output; it is used as-is, no extra noise).  Writes
    ``<name>.report.txt``, plus ``<name>.field.csv`` when the algorithm
    evaluates an indicator on a grid, plus ``<name>.nodes.csv`` for the
    finite-frequency (prony3d) algorithm.

``verify``
    Run the numeric self-checks and print one PASS/FAIL line per check.

``reproduce {table1,figures2d,table2,table3,prony-demo}``
    Run a bundled experiment configuration.  ``figures2d`` additionally
    writes ``figures2d_single_sensor.field.csv``, the indicator of a single
    sensor at (3, 0), whose high values concentrate on circles around that
    sensor.

Every subcommand that reads a config accepts repeated
``--set section.key=value`` overrides.  Exit codes: 0 success, 1 runtime or
precondition failure (message reported verbatim), 2 configuration or data
format error.  Outputs are byte-deterministic for a fixed config and seed.

The computational backend is chosen by the ``BHSOURCE_BACKEND`` environment
variable (``numba`` or ``numpy``) and thread count by ``BHSOURCE_THREADS``.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from importlib import resources

import numpy as np

from . import multi2d, multi3d, prony, single3d, verify
from .config import ExperimentConfig, load_config, parse_config_text
from .errors import ConfigError, DataFormatError
from .forward import MeasurementSet, synthesize_measurements
from .report import attach_truth, render_report, write_report
from .sampling import DEFAULT_REL_THRESHOLD

__all__ = ["main"]

MEASUREMENT_HEADER = "sensor_index,k,re,im"

REPRODUCE_CASES = {
    "table1": "table1.cfg",
    "figures2d": "figures2d.cfg",
    "table2": "table2.cfg",
    "table3": "table3.cfg",
    "prony-demo": "prony_demo.cfg",
}

# Frequency match tolerance (relative) when ingesting measurement CSVs.
_FREQ_RTOL = 1e-9


def write_measurements_csv(path, measurements: MeasurementSet) -> None:
    """Serialize samples as ``sensor_index,k,re,im`` rows, sensor-major."""
    lines = [MEASUREMENT_HEADER]
    freqs = measurements.frequencies.values
    for l in range(measurements.samples.shape[0]):
        for j in range(measurements.samples.shape[1]):
            u = measurements.samples[l, j]
            lines.append(
                f"{l},{repr(float(freqs[j]))},{repr(float(u.real))},{repr(float(u.imag))}"
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_measurements_csv(path, sensors, frequencies) -> MeasurementSet:
    """Load a measurement CSV against the configured sensors/frequencies.

    Every (sensor, frequency) pair must appear exactly once and the k column
    must reproduce the configured frequency grid.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc.strerror}") from None
    if not lines or lines[0].strip() != MEASUREMENT_HEADER:
        head = lines[0].strip() if lines else "<empty file>"
        raise DataFormatError(
            f"{path}: expected header {MEASUREMENT_HEADER!r}, got {head!r}"
        )
    L, J = len(sensors), len(frequencies)
    samples = np.full((L, J), np.nan + 0j, dtype=np.complex128)
    seen = np.zeros((L, J), dtype=bool)
    freqs = frequencies.values
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise DataFormatError(f"{path}:{lineno}: expected 4 columns, got {len(parts)}")
        try:
            l = int(parts[0])
            k = float(parts[1])
            re, im = float(parts[2]), float(parts[3])
        except ValueError:
            raise DataFormatError(f"{path}:{lineno}: non-numeric entry") from None
        if not 0 <= l < L:
            raise DataFormatError(
                f"{path}:{lineno}: sensor_index {l} outside 0..{L - 1}"
            )
        j = int(np.argmin(np.abs(freqs - k)))
        if abs(freqs[j] - k) > _FREQ_RTOL * max(1.0, abs(k)):
            raise DataFormatError(
                f"{path}:{lineno}: frequency {k!r} not on the configured grid"
            )
        if seen[l, j]:
            raise DataFormatError(
                f"{path}:{lineno}: duplicate entry for sensor {l}, k = {k!r}"
            )
        seen[l, j] = True
        samples[l, j] = complex(re, im)
    if not seen.all():
        l, j = np.argwhere(~seen)[0]
        raise DataFormatError(
            f"{path}: missing entry for sensor {l}, k = {repr(float(freqs[j]))}"
        )
    return MeasurementSet(sensors, frequencies, samples)


def _synthesize_from_config(cfg: ExperimentConfig) -> MeasurementSet:
    sources = cfg.sources()
    if len(sources) == 0:
        raise ConfigError(
            "source.1: at least one [source.N] section is required to synthesize"
        )
    return synthesize_measurements(
        sources, cfg.sensors(), cfg.frequencies(), cfg.noise_level, cfg.seed
    )


def dispatch(cfg: ExperimentConfig, measurements: MeasurementSet):
    """Run the configured algorithm and return its ReconstructionReport."""
    rel = cfg.rel_threshold if cfg.rel_threshold is not None else DEFAULT_REL_THRESHOLD
    sep = cfg.min_separation
    grid = cfg.grid()
    if cfg.algorithm == "single3d":
        estimate = single3d.run_algorithm1(measurements, grid)
        return single3d.estimate_to_report(
            estimate, sensor_count=len(measurements.sensors)
        )
    if cfg.algorithm in ("multi2d_real", "multi2d_complex"):
        kind = (
            multi2d.KIND_REAL
            if cfg.algorithm == "multi2d_real"
            else multi2d.KIND_COMPLEX
        )
        return multi2d.run_algorithm2(
            measurements, grid, kind, rel_threshold=rel, min_separation=sep
        )
    if cfg.algorithm == "multi3d":
        return multi3d.run_algorithm3(
            measurements, grid, rel_threshold=rel, min_separation=sep
        )
    return prony.run_finite_freq_3d(
        measurements,
        cfg.m_bound,
        grid=None if cfg.grid_free else grid,
        rel_threshold=rel,
        min_separation=sep,
    )


def run_inversion(cfg: ExperimentConfig, measurements: MeasurementSet, out_dir: str):
    """Shared invert/reproduce flow: dispatch, attach truth, write artifacts."""
    report = dispatch(cfg, measurements)
    truth = cfg.sources() if cfg.source_positions else None
    if truth is not None and report.positions.shape[0] == 0:
        truth = None  # no positions to compare (grid-free run): skip error/table blocks
    if truth is not None:
        attach_truth(report, truth)
    written = []
    if report.indicator_field is not None:
        field_path = os.path.join(out_dir, f"{cfg.name}.field.csv")
        report.indicator_field.to_csv(field_path)
        written.append(field_path)
    if report.node_sets is not None:
        nodes_path = os.path.join(out_dir, f"{cfg.name}.nodes.csv")
        prony.node_sets_to_csv(nodes_path, report.node_sets)
        written.append(nodes_path)
    report_path = os.path.join(out_dir, f"{cfg.name}.report.txt")
    write_report(report_path, render_report(report, list(cfg.resolved_items()), truth=truth))
    written.append(report_path)
    return report, written


def _print_outcome(report, written) -> None:
    for path in written:
        print(f"wrote {path}")
    print(f"estimated_count = {report.estimated_count}")


def cmd_synthesize(args) -> int:
    cfg = load_config(args.config, overrides=args.overrides)
    measurements = _synthesize_from_config(cfg)
    os.makedirs(args.output_dir, exist_ok=True)
    path = os.path.join(args.output_dir, f"{cfg.name}.measurements.csv")
    write_measurements_csv(path, measurements)
    print(f"wrote {path}")
    return 0


def cmd_invert(args) -> int:
    cfg = load_config(args.config, overrides=args.overrides)
    if args.data:
        measurements = read_measurements_csv(args.data, cfg.sensors(), cfg.frequencies())
    else:
        measurements = _synthesize_from_config(cfg)
    os.makedirs(args.output_dir, exist_ok=True)
    report, written = run_inversion(cfg, measurements, args.output_dir)
    _print_outcome(report, written)
    return 0


def cmd_verify(_args) -> int:
    results = verify.run_checks()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name}: {result.detail}")
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _bundled_config_text(case: str) -> str:
    return (
        resources.files("bhsource").joinpath("configs", REPRODUCE_CASES[case]).read_text(
            encoding="utf-8"
        )
    )


def cmd_reproduce(args) -> int:
    text = _bundled_config_text(args.case)
    cfg = parse_config_text(text, overrides=args.overrides)
    os.makedirs(args.output_dir, exist_ok=True)
    measurements = _synthesize_from_config(cfg)
    report, written = run_inversion(cfg, measurements, args.output_dir)
    if args.case == "figures2d":
        # Companion figure: one sensor at (3, 0); its indicator cannot separate
        # sources at equal distance, so the field concentrates on circles.
        single_cfg = dataclasses.replace(
            cfg,
            name=f"{cfg.name}_single_sensor",
            sensor_layout="explicit",
            sensor_points=((3.0, 0.0),),
            sensor_count=1,
            sensor_center=(),
            sensor_radius=0.0,
            sensor_phase=0.0,
        )
        single_measurements = _synthesize_from_config(single_cfg)
        kind = (
            multi2d.KIND_REAL
            if single_cfg.algorithm == "multi2d_real"
            else multi2d.KIND_COMPLEX
        )
        field = multi2d.indicator_field_2d(single_measurements, single_cfg.grid(), kind)
        single_path = os.path.join(
            args.output_dir, f"{single_cfg.name}.field.csv"
        )
        field.to_csv(single_path)
        written.append(single_path)
    _print_outcome(report, written)
    return 0


def _add_common(parser: argparse.ArgumentParser, with_config: bool = True) -> None:
    if with_config:
        parser.add_argument("config", help="experiment configuration file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        dest="overrides",
        metavar="SECTION.KEY=VALUE",
        help="override a config value (repeatable)",
    )
    parser.add_argument(
        "--output-dir",
        default=".",
        help="directory for output files (created if missing)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhsource",
        description="Multi-frequency point-source synthesis and recovery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_syn = sub.add_parser("synthesize", help="write measurement CSV from a config")
    _add_common(p_syn)
    p_syn.set_defaults(handler=cmd_synthesize)

    p_inv = sub.add_parser("invert", help="run the configured inversion")
    _add_common(p_inv)
    p_inv.add_argument(
        "--data",
        help="measurement CSV to invert (default: synthesize from the config)",
    )
    p_inv.set_defaults(handler=cmd_invert)

    p_ver = sub.add_parser("verify", help="run numeric self-checks")
    p_ver.set_defaults(handler=cmd_verify)

    p_rep = sub.add_parser("reproduce", help="run a bundled experiment")
    p_rep.add_argument("case", choices=sorted(REPRODUCE_CASES))
    _add_common(p_rep, with_config=False)
    p_rep.set_defaults(handler=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
