"""
Sweep configuration.

The config file is TOML restricted to flat key = value lines: a top-level
`mode` key and the sections [structure], [grid], [bias], [landauer],
[output] and [logging]. Every section maps onto a dataclass with defaults;
unknown keys, wrong types and missing required keys are reported with the
line number of the offending entry.
"""

from __future__ import annotations

import os
import re
import types
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Any, Union, get_args, get_origin, get_type_hints

import numpy as np
import toml
import tomli

from metaslab.errors import ConfigError, StructureError
from metaslab.physics.landauer import LandauerConfig
from metaslab.physics.structure import (
    BiasKind,
    BiasModel,
    Heterostructure,
    Layer,
)
from metaslab.tasks.presets import get_preset
from metaslab.utils import GenericConf, section_from_dict


class Mode(Enum):
    TRANSMISSION = "transmission"
    IV = "iv"
    TRAVERSAL = "traversal"
    TRAVERSAL_BIAS = "traversal_bias"


# (min, max, n_points) of the independent variable if the config has none.
DEFAULT_GRIDS = {
    Mode.TRANSMISSION: (0.001, 0.6, 600),
    Mode.IV: (0.0, 1.2, 121),
    Mode.TRAVERSAL: (0.001, 0.499, 499),
    Mode.TRAVERSAL_BIAS: (0.0, 0.6, 61),
}

INLINE_STRUCTURE_KEYS = (
    "left_mass",
    "right_mass",
    "masses",
    "potentials",
    "thicknesses",
)


@dataclass
class StructureConf(GenericConf):
    preset: str | None = None
    left_mass: float | None = None
    left_potential: float = 0.0
    right_mass: float | None = None
    right_potential: float = 0.0
    masses: list[float] | None = None
    potentials: list[float] | None = None
    thicknesses: list[float] | None = None


@dataclass
class GridConf(GenericConf):
    min: float | None = None
    max: float | None = None
    n_points: int | None = None
    # Fixed electron energy in eV for the traversal_bias mode.
    energy: float = 0.2


@dataclass
class BiasConf(GenericConf):
    kind: str = BiasKind.MIDPOINT.value
    n_steps: int = 1
    # Fixed bias in V for the energy sweeps.
    voltage: float = 0.0


@dataclass
class OutputConf(GenericConf):
    path: str = "metaslab.csv"
    threads: int | str = 1
    verify: bool = False
    gnuplot: bool = False


@dataclass
class LoggingConf(GenericConf):
    level: str = "INFO"
    logfile: str | None = None


SECTIONS: dict[str, type[GenericConf]] = {
    "structure": StructureConf,
    "grid": GridConf,
    "bias": BiasConf,
    "landauer": LandauerConfig,
    "output": OutputConf,
    "logging": LoggingConf,
}


@dataclass
class SweepConfig:
    mode: Mode
    structure: StructureConf
    grid: GridConf
    bias: BiasConf
    landauer: LandauerConfig
    output: OutputConf
    logging: LoggingConf
    # "section.key: file value -> flag value" for every flag that won.
    overrides: list[str] = field(default_factory=list)

    def heterostructure(self) -> Heterostructure:
        s = self.structure
        if s.preset is not None:
            return get_preset(s.preset).structure()

        interior = [
            Layer(mass=m, potential=v, thickness=t)
            for m, v, t in zip(
                s.masses or [], s.potentials or [], s.thicknesses or [], strict=True
            )
        ]
        return Heterostructure(
            left_lead=Layer(mass=s.left_mass or 0.0, potential=s.left_potential),
            interior=interior,
            right_lead=Layer(mass=s.right_mass or 0.0, potential=s.right_potential),
        )

    def bias_model(self, voltage: float | None = None) -> BiasModel:
        return BiasModel(
            kind=BiasKind(self.bias.kind),
            voltage=self.bias.voltage if voltage is None else voltage,
            n_steps=self.bias.n_steps,
        )

    def grid_values(self) -> np.ndarray:
        return np.linspace(self.grid.min, self.grid.max, self.grid.n_points)

    def n_threads(self) -> int:
        if self.output.threads == "auto":
            return os.cpu_count() or 1
        return int(self.output.threads)

    def to_dict(self) -> dict:
        """Resolved config without unset (None) keys."""

        res: dict[str, Any] = {"mode": self.mode.value}
        for name in SECTIONS:
            section = asdict(getattr(self, name))
            res[name] = {k: v for k, v in section.items() if v is not None}
        return res

    def echo(self) -> str:
        """The resolved config as TOML; parse_config(echo()) restores it."""
        return toml.dumps(self.to_dict())


def _key_line(text: str, section: str | None, key: str | None = None) -> int | None:
    """
    1-based line of `key` in `section` (None: top level). Without a key the
    line of the section header is returned.
    """

    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        if m := re.match(r"^\s*\[\s*([^\]\s]+)\s*\]", line):
            current = m.group(1)
            if key is None and current == section:
                return number
            continue
        if key is not None and current == section:
            if re.match(rf"^\s*{re.escape(key)}\s*=", line):
                return number
    return None


def _matches(value: Any, hint: Any) -> bool:
    origin = get_origin(hint)
    if origin in (Union, types.UnionType):
        return any(_matches(value, arg) for arg in get_args(hint))
    if hint is type(None):
        return value is None
    if origin is list:
        (item,) = get_args(hint)
        return isinstance(value, list) and all(_matches(v, item) for v in value)
    if hint is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if hint is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, hint)


def _coerce(value: Any, hint: Any) -> Any:
    """Integers given for float keys are stored as floats."""

    if isinstance(value, bool):
        return value
    if hint is float or float in get_args(hint):
        if isinstance(value, int):
            return float(value)
    if isinstance(value, list):
        return [float(v) if isinstance(v, int) else v for v in value]
    return value


def _check_types(conf: GenericConf, section: str, text: str) -> None:
    hints = get_type_hints(type(conf))
    for f in fields(conf):
        value = getattr(conf, f.name)
        if not _matches(value, hints[f.name]):
            raise ConfigError(
                f"[{section}] {f.name}: expected {hints[f.name]}, got {value!r}",
                line=_key_line(text, section, f.name),
            )
        setattr(conf, f.name, _coerce(value, hints[f.name]))


def parse_grid(text: str) -> tuple[float, float, int]:
    """Parses 'min:max:n'."""

    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be min:max:n, got '{text}'")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"grid must be min:max:n, got '{text}'") from None


def _check_output_path(path: str) -> None:
    target = os.path.abspath(os.path.expanduser(path))
    if os.path.isdir(target):
        raise ConfigError(f"output path '{path}' is a directory")
    parent = os.path.dirname(target)
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise ConfigError(f"output path '{path}' is not writable")


def _apply_overrides(raw: dict, overrides: dict[tuple[str, str], Any]) -> list[str]:
    res = []
    for (section, key), value in overrides.items():
        if section == "":
            old = raw.get(key)
            raw[key] = value
            name = key
        elif section == "structure" and key == "preset":
            # A preset defines the whole stack.
            old = raw.get("structure", {}).get("preset")
            raw["structure"] = {"preset": value}
            name = "structure.preset"
        else:
            old = raw.setdefault(section, {}).get(key)
            raw[section][key] = value
            name = f"{section}.{key}"
        res.append(f"{name}: {old!r} -> {value!r}")
    return res


def parse_config(
    text: str, overrides: dict[tuple[str, str], Any] | None = None
) -> SweepConfig:
    """
    Parses config text and applies flag overrides, keyed by (section, key)
    with section "" for the top-level mode. Defaults are filled in.
    """

    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        m = re.search(r"line (\d+)", str(e))
        raise ConfigError(str(e), line=int(m.group(1)) if m else None) from None

    for key, value in raw.items():
        if key == "mode":
            continue
        if not isinstance(value, dict):
            raise ConfigError(
                f"unknown top-level key '{key}'", _key_line(text, None, key)
            )
        if key not in SECTIONS:
            raise ConfigError(f"unknown section [{key}]", _key_line(text, key))
        for sub_key, sub_value in value.items():
            if isinstance(sub_value, dict):
                raise ConfigError(
                    f"nested table [{key}.{sub_key}] not supported",
                    _key_line(text, f"{key}.{sub_key}"),
                )

    applied = _apply_overrides(raw, overrides or {})

    # Preset defaults rank below the file and the flags.
    structure_raw = raw.get("structure", {})
    preset = None
    if (name := structure_raw.get("preset")) is not None:
        try:
            preset = get_preset(name)
        except KeyError:
            raise ConfigError(
                f"unknown preset '{name}'", _key_line(text, "structure", "preset")
            ) from None
        if inline := [k for k in structure_raw if k != "preset"]:
            raise ConfigError(
                f"preset '{name}' cannot be combined with {', '.join(inline)}",
                _key_line(text, "structure", inline[0]),
            )
        for section, defaults in preset.defaults.items():
            for key, value in defaults.items():
                raw.setdefault(section, {}).setdefault(key, value)

    mode_value = raw.get("mode", preset.mode if preset else Mode.TRANSMISSION.value)
    try:
        mode = Mode(mode_value)
    except ValueError:
        raise ConfigError(
            f"unknown mode {mode_value!r}", _key_line(text, None, "mode")
        ) from None

    sections: dict[str, Any] = {}
    for name, cls in SECTIONS.items():
        try:
            conf = section_from_dict(cls(), raw.get(name))
        except KeyError as e:
            key = e.args[0]
            raise ConfigError(
                f"unknown key '{key}' in [{name}]", _key_line(text, name, key)
            ) from None
        _check_types(conf, name, text)
        sections[name] = conf

    config = SweepConfig(mode=mode, overrides=applied, **sections)
    _validate(config, text)
    return config


def _validate(config: SweepConfig, text: str) -> None:
    s = config.structure
    if s.preset is None:
        missing = [k for k in INLINE_STRUCTURE_KEYS if getattr(s, k) is None]
        if missing:
            raise ConfigError(
                f"[structure] needs a preset or the keys {', '.join(missing)}",
                _key_line(text, "structure"),
            )
        if not len(s.masses or []) == len(s.potentials or []) == len(
            s.thicknesses or []
        ):
            raise ConfigError(
                "[structure] masses, potentials and thicknesses differ in length",
                _key_line(text, "structure", "masses"),
            )
    try:
        config.heterostructure()
    except StructureError as e:
        raise ConfigError(f"[structure] {e.message}", _key_line(text, "structure"))

    g = config.grid
    g_min, g_max, g_n = DEFAULT_GRIDS[config.mode]
    g.min = g_min if g.min is None else g.min
    g.max = g_max if g.max is None else g.max
    g.n_points = g_n if g.n_points is None else g.n_points
    if g.n_points < 2:
        raise ConfigError(
            f"[grid] n_points must be at least 2, got {g.n_points}",
            _key_line(text, "grid", "n_points"),
        )
    if not g.min < g.max:
        raise ConfigError(
            f"[grid] min {g.min} must be below max {g.max}",
            _key_line(text, "grid", "min") or _key_line(text, "grid", "max"),
        )

    try:
        config.bias_model()
    except (ValueError, StructureError) as e:
        raise ConfigError(f"[bias] {e}", _key_line(text, "bias")) from None

    try:
        config.landauer.validate()
    except ValueError as e:
        raise ConfigError(f"[landauer] {e}", _key_line(text, "landauer")) from None

    threads = config.output.threads
    if threads != "auto" and not (isinstance(threads, int) and threads >= 1):
        raise ConfigError(
            f"[output] threads must be a positive integer or 'auto', got {threads!r}",
            _key_line(text, "output", "threads"),
        )
    _check_output_path(config.output.path)
