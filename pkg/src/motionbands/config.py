"""Runtime configuration: one JSON document, strictly validated.

Unknown keys are rejected so typos fail loudly; every CLI flag overrides
exactly one dotted config key. Sub-seeds for subcommands derive from the
master seed by stable hashing, so one (config, seed) pair pins the whole
artifact tree.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, ValidationError


class ConfigError(ValueError):
    """Configuration could not be loaded or validated."""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FilterConfig(_Section):
    t_l1_s: float = 1800.0
    t_l2_days: float = 10.0
    t_s1_s: float = 20.0
    t_s2_s: float = 1.0
    frame_rate: float = 30.0
    shortterm_rate: float = 1.0


class MotionConfig(_Section):
    block_size: int = 16
    noise_floor: float = 8.0


class EventsConfig(_Section):
    k_sigma: float = 2.0
    cooldown_s: float = 3.0
    min_threshold: float = 0.02
    min_days: int = 3
    reinvoke_every_s: float = 0.0


class EnergyConfig(_Section):
    activity_power_w: float = 50.0
    network_activity_power_w: float = 80.0
    detector_power_w: float = 153.0
    detector_fps: float = 14.79
    cameras: int = 32
    workday_h: float = 10.0
    events_per_day: float = 300.0


class PlannerConfig(_Section):
    w1: float = 0.5
    w2: float = 0.5
    lam: float = 1.0
    staleness_s: float = 5.0
    include_moving: bool = False
    profile_epsilon: float = 1e-3


class CostmapConfig(_Section):
    resolution_m: float = 0.5
    density_scale: float = 254.0


class Config(_Section):
    seed: int = 0
    camera_id: str = "cam0"
    store_dir: str = "stores"
    scenario: str | None = None
    filter: FilterConfig = FilterConfig()
    motion: MotionConfig = MotionConfig()
    events: EventsConfig = EventsConfig()
    energy: EnergyConfig = EnergyConfig()
    planner: PlannerConfig = PlannerConfig()
    costmap: CostmapConfig = CostmapConfig()


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def apply_overrides(data: dict, overrides: dict[str, Any]) -> dict:
    """Set dotted-key overrides (e.g. ``events.k_sigma``) in a config dict."""
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = data
        keys = dotted.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override {dotted}: {key} is not a section")
        node[keys[-1]] = value
    return data


def load_config(path: str | Path | None, overrides: dict[str, Any] | None = None) -> Config:
    """Load and validate a config file; ``None`` uses pure defaults."""
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
    if overrides:
        apply_overrides(data, overrides)
    try:
        return Config.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_validation_error(exc)) from exc


def derive_seed(master_seed: int, *scope: str | int) -> int:
    """Stable sub-seed for a subcommand (or any named scope)."""
    text = ":".join([str(master_seed), *map(str, scope)])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")
