"""Planner configuration: defaults, YAML/JSON loading and flag overrides."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from .metrics import VelocityModel
from .sensor import SensorModel
from .tour import GraspConfig
from .waypoints import StopConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PlanConfig:
    """User-facing settings; angles are degrees here and radians everywhere else."""

    fov_deg: float = 120.0
    range_m: float = 5.0
    min_coverage: float = 0.95
    epsilon: float = 0.005
    max_iterations: int = 10_000
    grasp_iters: int = 32
    rcl: int = 3
    seed: int = 0
    headings: int = 8
    inflate_m: float = 0.15
    v_linear: float = 0.26
    v_angular: float = 1.82
    start: tuple[float, float, float] | None = None  # world x, y, heading degrees
    rotation_mode: str = "path"
    threads: int = 1

    def __post_init__(self) -> None:
        if self.headings < 1:
            raise ConfigError(f"headings must be >= 1, got {self.headings}")
        if self.inflate_m < 0:
            raise ConfigError(f"inflate_m must be >= 0, got {self.inflate_m}")
        if self.rotation_mode not in ("path", "waypoints"):
            raise ConfigError(f"rotation_mode must be 'path' or 'waypoints', got {self.rotation_mode!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        try:
            self.sensor, self.stop, self.grasp, self.velocity
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def sensor(self) -> SensorModel:
        return SensorModel(math.radians(self.fov_deg), self.range_m)

    @property
    def stop(self) -> StopConfig:
        return StopConfig(self.min_coverage, self.epsilon, self.max_iterations)

    @property
    def grasp(self) -> GraspConfig:
        return GraspConfig(self.grasp_iters, self.rcl, self.seed)

    @property
    def velocity(self) -> VelocityModel:
        return VelocityModel(self.v_linear, self.v_angular)

    def updated(self, values: Mapping[str, Any]) -> "PlanConfig":
        """Copy with ``values`` applied; ``None`` values are ignored."""
        known = {f.name: f for f in fields(self)}
        changes = {}
        for key, value in values.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if value is None:
                continue
            changes[key] = _coerce(key, value)
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_INT_KEYS = {"max_iterations", "grasp_iters", "rcl", "seed", "headings", "threads"}


def _coerce(key: str, value: Any) -> Any:
    try:
        if key == "start":
            return parse_start(value)
        if key == "rotation_mode":
            return str(value)
        if key in _INT_KEYS:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"expected an integer, got {value}")
            return int(value)
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None


def parse_start(value: Any) -> tuple[float, float, float]:
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
    else:
        parts = list(value)
    if len(parts) == 2:
        parts.append(0.0)
    if len(parts) != 3:
        raise ValueError(f"start must be 'x,y[,deg]', got {value!r}")
    return tuple(float(p) for p in parts)


def load_config(path: str | Path) -> PlanConfig:
    """Read a YAML (or JSON) mapping of PlanConfig keys."""
    path = Path(path)
    try:
        text = path.read_text()
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return PlanConfig().updated(data)
