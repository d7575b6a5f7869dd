"""Run configuration: YAML scenario files, presets, and overrides.

A config file is a nested key/value document; every field has a default.
The ``fig2`` preset ships with the package and encodes the standing
push-recovery comparison setup (38 kg point mass, 0.8 m CoM height,
reference ZMP near a lateral edge of the sole, k_p = 3).
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .controllers import ControllerGains
from .geometry import ContactGeometry, FeasibilityLimits
from .models import GRAVITY
from .simulation import CONTROLLERS, Impulse, Scenario


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


DEFAULTS: dict = {
    "mass": 38.0,
    "com_height": 0.8,
    "edge_offset": 0.03,
    "gravity": GRAVITY,
    "geometry": {
        "half_extent_x": 0.112,
        "half_extent_y": 0.065,
    },
    "gains": {
        "k_p": 3.0,
        "kappa": 0.5,
        "dt": 0.005,
    },
    "limits": {
        "f_min": 37.278,  # 0.1 * m * g for the default mass
        "f_max": 745.56,  # 2.0 * m * g
        "h_min": 0.6,
        "h_max": 1.0,
    },
    "impulse": {
        "time": 1.0,
        "direction": [0.0, 1.0, 0.0],
        "magnitude": 0.0,
    },
    "duration": 10.0,
    "substeps": 1,
    "controller": "vhip",
    "seed": 0,
    "output": None,
    "format": "csv",
}

_SCALAR_FIELDS = {
    "mass": (float, lambda v: v > 0, "must be a positive number"),
    "com_height": (float, lambda v: v > 0, "must be a positive number"),
    "edge_offset": (float, lambda v: v > 0, "must be a positive number"),
    "gravity": (float, lambda v: v > 0, "must be a positive number"),
    "duration": (float, lambda v: v > 0, "must be a positive number"),
    "substeps": (int, lambda v: v >= 1, "must be an integer >= 1"),
    "seed": (int, lambda v: True, "must be an integer"),
}


@dataclass(frozen=True)
class RunConfig:
    """Validated scenario configuration plus output options."""

    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    def scenario(self) -> Scenario:
        d = self.data
        geometry = ContactGeometry.flat(
            d["geometry"]["half_extent_x"], d["geometry"]["half_extent_y"]
        )
        return Scenario(
            mass=d["mass"],
            com_height=d["com_height"],
            edge_offset=d["edge_offset"],
            geometry=geometry,
            gains=ControllerGains(**d["gains"]),
            limits=FeasibilityLimits(**d["limits"]),
            impulse=Impulse(
                time=d["impulse"]["time"],
                direction=np.asarray(d["impulse"]["direction"], dtype=float),
                magnitude=d["impulse"]["magnitude"],
            ),
            duration=d["duration"],
            controller=d["controller"],
            substeps=d["substeps"],
            g=d["gravity"],
        )

    def dump(self) -> str:
        """Round-trippable YAML echo of the effective configuration."""
        return yaml.safe_dump(self.data, sort_keys=True, default_flow_style=False)

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def output(self) -> str | None:
        return self.data["output"]


def _require_number(value, path: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return kind(value)


def _validate(data: dict) -> dict:
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    merged = copy.deepcopy(DEFAULTS)
    for key, value in data.items():
        if isinstance(DEFAULTS[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: expected a mapping, got {value!r}")
            bad = set(value) - set(DEFAULTS[key])
            if bad:
                raise ConfigError(f"{key}: unknown keys {sorted(bad)}")
            merged[key].update(value)
        else:
            merged[key] = value

    for key, (kind, check, message) in _SCALAR_FIELDS.items():
        merged[key] = _require_number(merged[key], key, kind)
        if not check(merged[key]):
            raise ConfigError(f"{key}: {message}, got {merged[key]}")
    for section in ("geometry", "gains", "limits"):
        for key, value in merged[section].items():
            merged[section][key] = _require_number(value, f"{section}.{key}")
    if merged["controller"] not in CONTROLLERS:
        raise ConfigError(
            f"controller: expected one of {list(CONTROLLERS)}, got {merged['controller']!r}"
        )
    if merged["format"] != "csv":
        raise ConfigError(f"format: only 'csv' is supported, got {merged['format']!r}")
    imp = merged["impulse"]
    imp["time"] = _require_number(imp["time"], "impulse.time")
    imp["magnitude"] = _require_number(imp["magnitude"], "impulse.magnitude")
    direction = imp["direction"]
    if not isinstance(direction, (list, tuple)) or len(direction) != 3:
        raise ConfigError(f"impulse.direction: expected a 3-vector, got {direction!r}")
    imp["direction"] = [
        _require_number(v, f"impulse.direction[{i}]") for i, v in enumerate(direction)
    ]
    if merged["output"] is not None and not isinstance(merged["output"], str):
        raise ConfigError(f"output: expected a path string, got {merged['output']!r}")
    return merged


def preset_path(name: str) -> Path:
    return Path(str(resources.files("vhip_balance").joinpath(f"presets/{name}.yaml")))


def load_config(source: str | Path | None, overrides: list[str] | None = None) -> RunConfig:
    """Load a config file (path or preset name) and apply key=value overrides.

    Override keys use dotted paths (``--set gains.k_p=3``); values are
    parsed as YAML scalars.
    """
    data: dict = {}
    if source is not None:
        path = Path(source)
        if not path.exists():
            candidate = preset_path(str(source))
            if candidate.exists():
                path = candidate
            else:
                raise ConfigError(f"config file not found: {source}")
        try:
            loaded = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        data = loaded
    merged = _validate(data)
    for override in overrides or []:
        if "=" not in override:
            raise ConfigError(f"override {override!r} is not of the form key=value")
        key, _, raw = override.partition("=")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override {override!r}: invalid value: {exc}") from exc
        node = merged
        parts = key.strip().split(".")
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                raise ConfigError(f"override {override!r}: unknown section {part!r}")
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError(f"override {override!r}: unknown key {parts[-1]!r}")
        node[parts[-1]] = value
        merged = _validate(merged)
    return RunConfig(data=merged)
