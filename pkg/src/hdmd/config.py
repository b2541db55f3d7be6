"""Experiment configuration: a flat, typed key-value text format.

Files look like

    # comment lines and blanks are ignored
    schema = 1
    experiment = schrodinger
    grid = 75 75
    dict_width = 3.0

The first effective line must declare ``schema = 1``.  Every key is typed,
defaults mirror the built-in harmonic-oscillator benchmark, and unknown keys
are rejected with their line number.  Validation failures always name the
offending field.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

SCHEMA_VERSION = 1

EXPERIMENTS = ("schrodinger", "probes", "custom-snapshots")


class ConfigError(ValueError):
    """Configuration failure; carries the field name and source line if known."""

    def __init__(self, message: str, field_name: str = "", line: int | None = None):
        prefix = f"config error"
        if line is not None:
            prefix += f" (line {line})"
        super().__init__(f"{prefix}: {message}")
        self.field_name = field_name
        self.line = line


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "schrodinger"
    grid: tuple[int, ...] = (75, 75)
    dict_box_min: float = -4.0
    dict_box_max: float = 4.0
    dict_per_axis: int = 20
    dict_width: float = 3.0
    dict_amplitude_re: float = 1.0
    dict_amplitude_im: float = 1.0
    rank_tolerance: float = 1e-12
    cluster_radius: float = 0.4
    energy_cutoff: int = 12
    output_dir: str = "hdmd-out"
    seed: int = 0
    probe_n_ref: int = 2000
    probe_sizes: tuple[int, ...] = (2, 4, 8, 16, 32, 800)
    probe_max_moment: int = 8

    @property
    def dict_amplitude(self) -> complex:
        return complex(self.dict_amplitude_re, self.dict_amplitude_im)

    def dictionary_box(self, dimension: int = 2) -> tuple[tuple[float, float], ...]:
        return tuple((self.dict_box_min, self.dict_box_max) for _ in range(dimension))


def _parse_int(raw: str) -> int:
    return int(raw, 10)


def _parse_float(raw: str) -> float:
    return float(raw)


def _parse_str(raw: str) -> str:
    return raw


def _parse_int_tuple(raw: str) -> tuple[int, ...]:
    return tuple(int(tok, 10) for tok in raw.split())


_PARSERS = {
    "experiment": _parse_str,
    "grid": _parse_int_tuple,
    "dict_box_min": _parse_float,
    "dict_box_max": _parse_float,
    "dict_per_axis": _parse_int,
    "dict_width": _parse_float,
    "dict_amplitude_re": _parse_float,
    "dict_amplitude_im": _parse_float,
    "rank_tolerance": _parse_float,
    "cluster_radius": _parse_float,
    "energy_cutoff": _parse_int,
    "output_dir": _parse_str,
    "seed": _parse_int,
    "probe_n_ref": _parse_int,
    "probe_sizes": _parse_int_tuple,
    "probe_max_moment": _parse_int,
}


def validate(config: ExperimentConfig) -> ExperimentConfig:
    """Range-check every field; raises ConfigError naming the first bad one."""

    def fail(name: str, message: str):
        raise ConfigError(f"{name} {message}", field_name=name)

    c = config
    if c.experiment not in EXPERIMENTS:
        fail("experiment", f"must be one of {EXPERIMENTS}, got {c.experiment!r}")
    if len(c.grid) not in (1, 2):
        fail("grid", f"expects 1 or 2 per-axis counts, got {len(c.grid)}")
    if any(n < 2 for n in c.grid):
        fail("grid", f"needs at least 2 points per axis, got {c.grid}")
    if not c.dict_box_max > c.dict_box_min:
        fail("dict_box_max", f"must exceed dict_box_min, got [{c.dict_box_min}, {c.dict_box_max}]")
    if c.dict_per_axis < 1:
        fail("dict_per_axis", f"must be >= 1, got {c.dict_per_axis}")
    if not c.dict_width > 0:
        fail("dict_width", f"must be positive, got {c.dict_width}")
    if c.rank_tolerance < 0:
        fail("rank_tolerance", f"must be nonnegative, got {c.rank_tolerance}")
    if not c.cluster_radius > 0:
        fail("cluster_radius", f"must be positive, got {c.cluster_radius}")
    if c.cluster_radius >= 0.5:
        fail("cluster_radius", f"must stay below half the unit energy gap (0.5), got {c.cluster_radius}")
    if c.energy_cutoff < 1:
        fail("energy_cutoff", f"must be >= 1, got {c.energy_cutoff}")
    if c.probe_n_ref < 2:
        fail("probe_n_ref", f"must be >= 2, got {c.probe_n_ref}")
    if not c.probe_sizes:
        fail("probe_sizes", "must not be empty")
    if any(n < 1 for n in c.probe_sizes) or any(
        b <= a for a, b in zip(c.probe_sizes, c.probe_sizes[1:])
    ):
        fail("probe_sizes", f"must be strictly increasing positive integers, got {c.probe_sizes}")
    if c.probe_sizes[-1] > c.probe_n_ref:
        fail("probe_sizes", f"largest size {c.probe_sizes[-1]} exceeds probe_n_ref {c.probe_n_ref}")
    if c.probe_max_moment < 0:
        fail("probe_max_moment", f"must be >= 0, got {c.probe_max_moment}")
    if len(c.grid) == 1:
        c = replace(c, grid=(c.grid[0], c.grid[0]))
    return c


def load_config(path) -> ExperimentConfig:
    """Parse and validate a config file; defaults fill unset keys."""
    text = Path(path).read_text()
    values: dict[str, object] = {}
    seen_schema = False
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if not seen_schema:
            if key != "schema":
                raise ConfigError(
                    f"first setting must be 'schema = {SCHEMA_VERSION}', got key {key!r}",
                    field_name="schema",
                    line=lineno,
                )
            if raw_value != str(SCHEMA_VERSION):
                raise ConfigError(
                    f"unsupported schema version {raw_value!r} (expected {SCHEMA_VERSION})",
                    field_name="schema",
                    line=lineno,
                )
            seen_schema = True
            continue
        if key == "schema":
            raise ConfigError("duplicate schema line", field_name="schema", line=lineno)
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", field_name=key, line=lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", field_name=key, line=lineno)
        try:
            values[key] = _PARSERS[key](raw_value)
        except ValueError:
            raise ConfigError(
                f"{key}: cannot parse value {raw_value!r}", field_name=key, line=lineno
            ) from None
    if not seen_schema:
        raise ConfigError("missing 'schema = 1' line", field_name="schema")
    return validate(ExperimentConfig(**values))


def default_config() -> ExperimentConfig:
    return validate(ExperimentConfig())


def config_as_dict(config: ExperimentConfig) -> dict:
    out = {}
    for f in fields(config):
        value = getattr(config, f.name)
        out[f.name] = list(value) if isinstance(value, tuple) else value
    return out
