#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallback.

Runs the three hot operations (Bessel-J0 array evaluation, 2D indicator
field, 3D indicator field) on representative workloads under each backend
and prints a timing table.  Use ``--full`` for the acceptance-scale 2D grid
(101 x 101 nodes); the default grid is 51 x 51 so a full comparison stays
under half a minute on one core.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from bhsource import backend
from bhsource.forward import FrequencyGrid, PointSource, SourceConfig, synthesize_measurements
from bhsource.geometry import circle_array_2d, sphere_array_3d
from bhsource.multi2d import KIND_REAL, indicator_field_2d
from bhsource.multi3d import indicator_field_3d
from bhsource.sampling import SamplingGrid


def _band(k_min: float, k_max: float, step: float) -> FrequencyGrid:
    count = int(round((k_max - k_min) / step)) + 1
    return FrequencyGrid(k_min + step * np.arange(count))


def _sources(dimension: int, entries) -> SourceConfig:
    return SourceConfig(
        dimension,
        tuple(PointSource(np.asarray(p, dtype=float), complex(s)) for p, s in entries),
    )


def build_workloads(full: bool, array_size: int) -> dict:
    """Deterministic inputs shared by both backends."""
    ms2 = synthesize_measurements(
        _sources(2, [((2, 2), 1.0), ((2, 4), 1.1), ((4, 2), 1.2), ((4, 4), 1.3)]),
        circle_array_2d(10, (3.0, 3.0), 5.0),
        _band(1.0, 50.0, 0.1),
        noise_level=0.10,
        seed=1,
    )
    ms3 = synthesize_measurements(
        _sources(3, [((1, 0, 0), 1 + 1j), ((0, 2, 0), 1 - 1j),
                     ((2, 1, 0), 1 + 1.5j), ((0, 0, 1.5), 1.5 + 1j)]),
        sphere_array_3d(11, (1.0, 1.0, 1.0), 3.0),
        _band(1.0, 100.0, 0.1),
        noise_level=0.10,
        seed=1,
    )
    spacing2 = 0.05 if full else 0.1
    return {
        "x": np.linspace(0.01, 80.0, array_size),
        "ms2": ms2,
        "grid2": SamplingGrid(2, (0.5, 0.5), (5.5, 5.5), spacing2),
        "ms3": ms3,
        "grid3": SamplingGrid(3, (-0.5, -0.5, -0.5), (2.5, 2.5, 2.5), 0.1),
    }


def operations(w: dict) -> list:
    """(label, workload description, callable) triples."""
    n2 = np.prod(w["grid2"].axis_counts)
    n3 = np.prod(w["grid3"].axis_counts)
    return [
        (
            "bessel_j0 array",
            f"{w['x'].size:,} points",
            lambda: backend.kernels().j0_array(w["x"]),
        ),
        (
            "2D indicator field",
            f"{n2:,} nodes, 10 sensors, {w['ms2'].frequencies.values.size} frequencies",
            lambda: indicator_field_2d(w["ms2"], w["grid2"], KIND_REAL),
        ),
        (
            "3D indicator field",
            f"{n3:,} nodes, 11 sensors, {w['ms3'].frequencies.values.size} frequencies",
            lambda: indicator_field_3d(w["ms3"], w["grid3"]),
        ),
    ]


def best_of(fn, repeats: int) -> float:
    fn()  # warm: triggers JIT compilation / page-faults outside the timing
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions per operation (best is reported)")
    parser.add_argument("--full", action="store_true",
                        help="use the acceptance-scale 101x101 2D grid")
    parser.add_argument("--array-size", type=int, default=2_000_000,
                        help="points for the special-function array benchmark")
    args = parser.parse_args()

    workloads = build_workloads(args.full, args.array_size)
    ops = operations(workloads)

    available = ["numpy"]
    try:
        backend.set_backend("numba")
        available.insert(0, "numba")
    except Exception as exc:  # jit backend missing: report numpy only
        print(f"numba backend unavailable ({exc}); timing numpy only")

    timings: dict = {}
    for name in available:
        backend.set_backend(name)
        for label, _desc, fn in ops:
            timings[(name, label)] = best_of(fn, args.repeats)

    width = max(len(label) for label, _d, _f in ops)
    header = f"{'operation':<{width}}  {'workload':<42}"
    for name in available:
        header += f"  {name + ' [s]':>11}"
    if len(available) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, desc, _fn in ops:
        row = f"{label:<{width}}  {desc:<42}"
        for name in available:
            row += f"  {timings[(name, label)]:>11.3f}"
        if len(available) == 2:
            ratio = timings[("numpy", label)] / timings[("numba", label)]
            row += f"  {ratio:>7.2f}x"
        print(row)
    if len(available) == 2:
        print("\nspeedup = numpy time / numba time (values < 1 mean the numpy"
              " fallback is faster for that shape)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
