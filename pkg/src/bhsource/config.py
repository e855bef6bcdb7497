"""Experiment configuration: INI-style files mapped to domain objects.

Grammar (all keys lowercase; numbers accept plain decimal/scientific
notation; vectors are whitespace-separated):

    [experiment]
    name        = table1          ; output-file stem, [A-Za-z0-9._-]+
    dimension   = 3               ; 2 or 3
    algorithm   = single3d        ; single3d | multi2d_real | multi2d_complex
                                  ; | multi3d | prony3d
    noise_level = 0.10            ; relative noise amplitude, >= 0
    seed        = 7               ; nonnegative integer

    [sensors]
    layout = circle | sphere | explicit
    count  = 10                   ; circle/sphere
    center = 3 3                  ; circle/sphere, dimension entries
    radius = 5                    ; circle/sphere, > 0
    phase  = 0.0                  ; circle only, optional angular offset
    points =                      ; explicit: one sensor per line
        1 0 0
        0 1 0

    [frequency]
    kind  = band | harmonic | triple
    k_min = 1                     ; band
    k_max = 50                    ; band
    step  = 0.1                   ; band, must divide k_max - k_min
    k0    = 0.2                   ; harmonic / triple base frequency
    count = 12                    ; harmonic: number of multiples of k0

    [grid]                        ; required unless prony3d with grid_free
    lower   = 0.5 0.5
    upper   = 5.5 5.5
    spacing = 0.05

    [peaks]                       ; optional
    rel_threshold  = 0.5          ; in (0, 1)
    min_separation = 0.3          ; spatial units

    [prony]                       ; prony3d only
    m_bound   = 4                 ; assumed upper bound on source count
    grid_free = false             ; true: report distance sets only, no grid

    [source.1]                    ; one section per source, numbered from 1
    position = 2 2 2
    strength = 1 1                ; real and imaginary parts

Algorithm and frequency kind must agree: ``single3d`` uses ``triple``
(measurements at k0, 2*k0, 4*k0), ``prony3d`` uses ``harmonic``, the
multi-source samplers use ``band``.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .forward import FrequencyGrid, PointSource, SourceConfig
from .geometry import SensorArray, circle_array_2d, sphere_array_3d
from .sampling import SamplingGrid

__all__ = ["ExperimentConfig", "load_config", "parse_config_text"]

ALGORITHMS = ("single3d", "multi2d_real", "multi2d_complex", "multi3d", "prony3d")
LAYOUTS = ("circle", "sphere", "explicit")
FREQUENCY_KINDS = ("band", "harmonic", "triple")

_ALGORITHM_DIMENSION = {
    "single3d": 3,
    "multi2d_real": 2,
    "multi2d_complex": 2,
    "multi3d": 3,
    "prony3d": 3,
}
_ALGORITHM_FREQUENCY = {
    "single3d": "triple",
    "multi2d_real": "band",
    "multi2d_complex": "band",
    "multi3d": "band",
    "prony3d": "harmonic",
}

_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")
_SOURCE_RE = re.compile(r"^source\.([0-9]+)$")

_KNOWN_KEYS = {
    "experiment": {"name", "dimension", "algorithm", "noise_level", "seed"},
    "sensors": {"layout", "count", "center", "radius", "phase", "points"},
    "frequency": {"kind", "k_min", "k_max", "step", "k0", "count"},
    "grid": {"lower", "upper", "spacing"},
    "peaks": {"rel_threshold", "min_separation"},
    "prony": {"m_bound", "grid_free"},
}
_SOURCE_KEYS = {"position", "strength"}

# Relative tolerance for "step divides the band".
_BAND_TOL = 1e-6


def _fail(where: str, message: str) -> ConfigError:
    return ConfigError(f"{where}: {message}")


class _Section:
    """One INI section with typed, error-annotated accessors."""

    def __init__(self, name: str, raw: dict):
        self.name = name
        self.raw = raw
        self.used: set = set()

    def has(self, key: str) -> bool:
        return key in self.raw

    def _get(self, key: str) -> str:
        if key not in self.raw:
            raise _fail(f"{self.name}.{key}", "required key is missing")
        self.used.add(key)
        return self.raw[key]

    def string(self, key: str) -> str:
        value = self._get(key).strip()
        if not value:
            raise _fail(f"{self.name}.{key}", "value is empty")
        return value

    def choice(self, key: str, options) -> str:
        value = self.string(key)
        if value not in options:
            raise _fail(
                f"{self.name}.{key}",
                f"must be one of {', '.join(options)} (got {value!r})",
            )
        return value

    def floating(self, key: str, default=None) -> float:
        if default is not None and not self.has(key):
            return default
        text = self.string(key)
        try:
            value = float(text)
        except ValueError:
            raise _fail(f"{self.name}.{key}", f"not a number: {text!r}") from None
        if not np.isfinite(value):
            raise _fail(f"{self.name}.{key}", "must be finite")
        return value

    def integer(self, key: str, default=None) -> int:
        if default is not None and not self.has(key):
            return default
        text = self.string(key)
        try:
            return int(text)
        except ValueError:
            raise _fail(f"{self.name}.{key}", f"not an integer: {text!r}") from None

    def boolean(self, key: str, default: bool) -> bool:
        if not self.has(key):
            return default
        text = self.string(key).lower()
        if text in ("true", "yes", "1", "on"):
            self.used.add(key)
            return True
        if text in ("false", "no", "0", "off"):
            self.used.add(key)
            return False
        raise _fail(f"{self.name}.{key}", f"not a boolean: {text!r}")

    def vector(self, key: str, length: int) -> tuple:
        parts = self.string(key).split()
        try:
            values = tuple(float(p) for p in parts)
        except ValueError:
            raise _fail(
                f"{self.name}.{key}", f"not a numeric vector: {self.raw[key]!r}"
            ) from None
        if len(values) != length:
            raise _fail(
                f"{self.name}.{key}",
                f"expected {length} entries, got {len(values)}",
            )
        if not all(np.isfinite(v) for v in values):
            raise _fail(f"{self.name}.{key}", "entries must be finite")
        return values

    def point_rows(self, key: str, length: int) -> tuple:
        rows = [line for line in self.string(key).splitlines() if line.strip()]
        points = []
        for row in rows:
            parts = row.split()
            try:
                values = tuple(float(p) for p in parts)
            except ValueError:
                raise _fail(
                    f"{self.name}.{key}", f"non-numeric row: {row.strip()!r}"
                ) from None
            if len(values) != length:
                raise _fail(
                    f"{self.name}.{key}",
                    f"row {row.strip()!r} has {len(values)} entries, expected {length}",
                )
            points.append(values)
        if not points:
            raise _fail(f"{self.name}.{key}", "no points given")
        return tuple(points)

    def reject_unknown(self, known) -> None:
        unknown = sorted(set(self.raw) - set(known))
        if unknown:
            raise _fail(f"{self.name}.{unknown[0]}", "unknown key")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; builders produce domain objects."""

    name: str
    dimension: int
    algorithm: str
    noise_level: float
    seed: int
    sensor_layout: str
    sensor_count: int
    sensor_center: tuple
    sensor_radius: float
    sensor_phase: float
    sensor_points: tuple
    frequency_kind: str
    band: tuple  # (k_min, k_max, step) or ()
    k0: float
    harmonic_count: int
    grid_bounds: tuple  # (lower, upper, spacing) or ()
    rel_threshold: float | None
    min_separation: float | None
    m_bound: int
    grid_free: bool
    source_positions: tuple
    source_strengths: tuple
    overrides: tuple = field(default=())

    def sources(self) -> SourceConfig:
        points = tuple(
            PointSource(np.array(p, dtype=np.float64), s)
            for p, s in zip(self.source_positions, self.source_strengths)
        )
        return SourceConfig(self.dimension, points)

    def sensors(self) -> SensorArray:
        if self.sensor_layout == "circle":
            return circle_array_2d(
                self.sensor_count,
                self.sensor_center,
                self.sensor_radius,
                phase=self.sensor_phase,
            )
        if self.sensor_layout == "sphere":
            return sphere_array_3d(
                self.sensor_count, self.sensor_center, self.sensor_radius
            )
        return SensorArray(
            self.dimension, np.array(self.sensor_points, dtype=np.float64)
        )

    def frequencies(self) -> FrequencyGrid:
        if self.frequency_kind == "band":
            k_min, k_max, step = self.band
            n = int(round((k_max - k_min) / step)) + 1
            return FrequencyGrid(k_min + step * np.arange(n, dtype=np.float64))
        if self.frequency_kind == "harmonic":
            return FrequencyGrid(
                self.k0 * np.arange(1, self.harmonic_count + 1, dtype=np.float64)
            )
        return FrequencyGrid(np.array([self.k0, 2.0 * self.k0, 4.0 * self.k0]))

    def grid(self) -> SamplingGrid | None:
        if not self.grid_bounds:
            return None
        lower, upper, spacing = self.grid_bounds
        return SamplingGrid(
            self.dimension,
            np.array(lower, dtype=np.float64),
            np.array(upper, dtype=np.float64),
            spacing,
        )

    def resolved_items(self) -> tuple:
        """Canonical (key, value) pairs echoed into reports."""
        items = [
            ("experiment.name", self.name),
            ("experiment.dimension", str(self.dimension)),
            ("experiment.algorithm", self.algorithm),
            ("experiment.noise_level", repr(self.noise_level)),
            ("experiment.seed", str(self.seed)),
            ("sensors.layout", self.sensor_layout),
        ]
        if self.sensor_layout == "explicit":
            items.append(
                (
                    "sensors.points",
                    "; ".join(" ".join(repr(c) for c in p) for p in self.sensor_points),
                )
            )
        else:
            items.extend(
                [
                    ("sensors.count", str(self.sensor_count)),
                    ("sensors.center", " ".join(repr(c) for c in self.sensor_center)),
                    ("sensors.radius", repr(self.sensor_radius)),
                ]
            )
            if self.sensor_layout == "circle":
                items.append(("sensors.phase", repr(self.sensor_phase)))
        items.append(("frequency.kind", self.frequency_kind))
        if self.frequency_kind == "band":
            items.extend(
                [
                    ("frequency.k_min", repr(self.band[0])),
                    ("frequency.k_max", repr(self.band[1])),
                    ("frequency.step", repr(self.band[2])),
                ]
            )
        else:
            items.append(("frequency.k0", repr(self.k0)))
            if self.frequency_kind == "harmonic":
                items.append(("frequency.count", str(self.harmonic_count)))
        if self.grid_bounds:
            lower, upper, spacing = self.grid_bounds
            items.extend(
                [
                    ("grid.lower", " ".join(repr(c) for c in lower)),
                    ("grid.upper", " ".join(repr(c) for c in upper)),
                    ("grid.spacing", repr(spacing)),
                ]
            )
        if self.rel_threshold is not None:
            items.append(("peaks.rel_threshold", repr(self.rel_threshold)))
        if self.min_separation is not None:
            items.append(("peaks.min_separation", repr(self.min_separation)))
        if self.algorithm == "prony3d":
            items.append(("prony.m_bound", str(self.m_bound)))
            items.append(("prony.grid_free", "true" if self.grid_free else "false"))
        for i, (p, s) in enumerate(
            zip(self.source_positions, self.source_strengths), start=1
        ):
            items.append((f"source.{i}.position", " ".join(repr(c) for c in p)))
            items.append((f"source.{i}.strength", f"{repr(s.real)} {repr(s.imag)}"))
        return tuple(items)


def _apply_overrides(parser: configparser.ConfigParser, overrides) -> None:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected section.key=value")
        target, value = item.split("=", 1)
        target = target.strip()
        if "." not in target:
            raise ConfigError(f"override {item!r}: expected section.key=value")
        section, key = target.rsplit(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value.strip())


def parse_config_text(text: str, overrides=()) -> ExperimentConfig:
    """Parse and validate configuration text; raise ConfigError on problems."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    _apply_overrides(parser, overrides)

    sections = {}
    source_sections = []
    for name in parser.sections():
        match = _SOURCE_RE.match(name)
        if match:
            source_sections.append((int(match.group(1)), name))
            continue
        if name not in _KNOWN_KEYS:
            raise _fail(name, "unknown section")
        sections[name] = _Section(name, dict(parser.items(name)))

    for required in ("experiment", "sensors", "frequency"):
        if required not in sections:
            raise _fail(required, "required section is missing")
    for name, section in sections.items():
        section.reject_unknown(_KNOWN_KEYS[name])

    exp = sections["experiment"]
    name = exp.string("name")
    if not _NAME_RE.match(name):
        raise _fail("experiment.name", "must match [A-Za-z0-9._-]+")
    dimension = exp.integer("dimension")
    if dimension not in (2, 3):
        raise _fail("experiment.dimension", f"must be 2 or 3, got {dimension}")
    algorithm = exp.choice("algorithm", ALGORITHMS)
    if _ALGORITHM_DIMENSION[algorithm] != dimension:
        raise _fail(
            "experiment.algorithm",
            f"{algorithm} requires dimension {_ALGORITHM_DIMENSION[algorithm]}, "
            f"config says {dimension}",
        )
    noise_level = exp.floating("noise_level", default=0.0)
    if noise_level < 0:
        raise _fail("experiment.noise_level", "must be >= 0")
    seed = exp.integer("seed", default=0)
    if seed < 0:
        raise _fail("experiment.seed", "must be >= 0")

    sen = sections["sensors"]
    layout = sen.choice("layout", LAYOUTS)
    inapplicable = {
        "explicit": ("count", "center", "radius", "phase"),
        "sphere": ("phase", "points"),
        "circle": ("points",),
    }
    for key in inapplicable[layout]:
        if sen.has(key):
            raise _fail(f"sensors.{key}", f"does not apply to layout {layout!r}")
    sensor_count = 0
    sensor_center: tuple = ()
    sensor_radius = 0.0
    sensor_phase = 0.0
    sensor_points: tuple = ()
    if layout == "explicit":
        sensor_points = sen.point_rows("points", dimension)
        sensor_count = len(sensor_points)
    else:
        if layout == "circle" and dimension != 2:
            raise _fail("sensors.layout", "circle layout requires dimension 2")
        if layout == "sphere" and dimension != 3:
            raise _fail("sensors.layout", "sphere layout requires dimension 3")
        sensor_count = sen.integer("count")
        if sensor_count < 1:
            raise _fail("sensors.count", "must be >= 1")
        sensor_center = sen.vector("center", dimension)
        sensor_radius = sen.floating("radius")
        if sensor_radius <= 0:
            raise _fail("sensors.radius", "must be > 0")
        if layout == "circle":
            sensor_phase = sen.floating("phase", default=0.0)

    freq = sections["frequency"]
    kind = freq.choice("kind", FREQUENCY_KINDS)
    expected_kind = _ALGORITHM_FREQUENCY[algorithm]
    if kind != expected_kind:
        raise _fail(
            "frequency.kind",
            f"algorithm {algorithm} requires kind {expected_kind!r}, got {kind!r}",
        )
    band: tuple = ()
    k0 = 0.0
    harmonic_count = 0
    if kind == "band":
        k_min = freq.floating("k_min")
        k_max = freq.floating("k_max")
        step = freq.floating("step")
        if k_min <= 0:
            raise _fail("frequency.k_min", "must be > 0")
        if k_max <= k_min:
            raise _fail("frequency.k_max", "must exceed k_min")
        if step <= 0:
            raise _fail("frequency.step", "must be > 0")
        n = round((k_max - k_min) / step)
        if n < 1 or abs(k_min + n * step - k_max) > _BAND_TOL * step:
            raise _fail("frequency.step", "must divide k_max - k_min")
        band = (k_min, k_max, step)
    else:
        k0 = freq.floating("k0")
        if k0 <= 0:
            raise _fail("frequency.k0", "must be > 0")
        if kind == "harmonic":
            harmonic_count = freq.integer("count")
            if harmonic_count < 2:
                raise _fail("frequency.count", "must be >= 2")

    m_bound = 0
    grid_free = False
    if algorithm == "prony3d":
        if "prony" not in sections:
            raise _fail("prony", "required section is missing for prony3d")
        pro = sections["prony"]
        m_bound = pro.integer("m_bound")
        if m_bound < 1:
            raise _fail("prony.m_bound", "must be >= 1")
        grid_free = pro.boolean("grid_free", default=False)
        if harmonic_count <= 4 * m_bound:
            raise _fail(
                "frequency.count",
                f"prony3d needs count > 4*m_bound = {4 * m_bound}, got {harmonic_count}",
            )
    elif "prony" in sections:
        raise _fail("prony", f"section only applies to prony3d, not {algorithm}")

    grid_bounds: tuple = ()
    grid_required = not (algorithm == "prony3d" and grid_free)
    if grid_free and "grid" in sections:
        raise _fail(
            "prony.grid_free", "true conflicts with a [grid] section; remove one"
        )
    if "grid" in sections:
        gri = sections["grid"]
        lower = gri.vector("lower", dimension)
        upper = gri.vector("upper", dimension)
        spacing = gri.floating("spacing")
        try:
            SamplingGrid(
                dimension,
                np.array(lower, dtype=np.float64),
                np.array(upper, dtype=np.float64),
                spacing,
            )
        except ValueError as exc:
            raise _fail("grid.spacing", str(exc)) from None
        grid_bounds = (lower, upper, spacing)
    elif grid_required:
        raise _fail("grid", "required section is missing")

    rel_threshold = None
    min_separation = None
    if "peaks" in sections:
        pk = sections["peaks"]
        if pk.has("rel_threshold"):
            rel_threshold = pk.floating("rel_threshold")
            if not 0.0 < rel_threshold < 1.0:
                raise _fail("peaks.rel_threshold", "must lie strictly between 0 and 1")
        if pk.has("min_separation"):
            min_separation = pk.floating("min_separation")
            if min_separation <= 0:
                raise _fail("peaks.min_separation", "must be > 0")

    source_sections.sort()
    positions = []
    strengths = []
    for expected_index, (index, section_name) in enumerate(source_sections, start=1):
        if index != expected_index:
            raise _fail(
                section_name,
                f"source sections must be numbered consecutively from 1 "
                f"(expected source.{expected_index})",
            )
        src = _Section(section_name, dict(parser.items(section_name)))
        src.reject_unknown(_SOURCE_KEYS)
        positions.append(src.vector("position", dimension))
        re_im = src.vector("strength", 2)
        strength = complex(re_im[0], re_im[1])
        if strength == 0:
            raise _fail(f"{section_name}.strength", "must be nonzero")
        strengths.append(strength)

    config = ExperimentConfig(
        name=name,
        dimension=dimension,
        algorithm=algorithm,
        noise_level=noise_level,
        seed=seed,
        sensor_layout=layout,
        sensor_count=sensor_count,
        sensor_center=sensor_center,
        sensor_radius=sensor_radius,
        sensor_phase=sensor_phase,
        sensor_points=sensor_points,
        frequency_kind=kind,
        band=band,
        k0=k0,
        harmonic_count=harmonic_count,
        grid_bounds=grid_bounds,
        rel_threshold=rel_threshold,
        min_separation=min_separation,
        m_bound=m_bound,
        grid_free=grid_free,
        source_positions=tuple(positions),
        source_strengths=tuple(strengths),
        overrides=tuple(overrides),
    )
    # Exercise the builders so every constructor-level inconsistency (e.g.
    # duplicate source positions, sensors failing array validation) surfaces
    # at load time as a ConfigError instead of deep inside an algorithm.
    try:
        config.sources()
        config.sensors()
        config.frequencies()
        config.grid()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return config


def load_config(path: str, overrides=()) -> ExperimentConfig:
    """Read and validate a configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config_text(text, overrides=overrides)
