"""Run configuration loaded from a JSON file."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .dynamics import IntegrationConfig
from .errors import ConfigError, LandscapeError
from .landscape import DEFAULT_CAP
from .model import ModelConfig
from .patterns import MemoryPair

OUTPUT_KEYS = ("census", "summary", "graph", "trajectory")
FORMATS = ("text", "json")


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI run needs.

    JSON layout::

        {"memories": [[1, 1, -1, -1], [1, -1, 1, -1]],
         "epsilon": 0.3,
         "integrator": {"dt": 0.01, "t_max": 1000, "stop_tol": 1e-10},
         "census_cap": 14,
         "outputs": {"census": "census.jsonl", "summary": "summary.csv",
                     "graph": "graph.dot", "trajectory": "trajectory.csv"},
         "format": "text"}

    Only ``memories`` and ``epsilon`` are required.
    """

    xi1: tuple[int, ...]
    xi2: tuple[int, ...]
    epsilon: float
    integrator: IntegrationConfig = IntegrationConfig()
    census_cap: int = DEFAULT_CAP
    outputs: dict = field(default_factory=dict)
    format: str = "text"

    def __post_init__(self):
        if len(self.xi1) != len(self.xi2):
            raise ConfigError(f"memories differ in length: {len(self.xi1)} vs {len(self.xi2)}")
        if len(self.xi1) < 2:
            raise ConfigError("memories need at least 2 components")
        if not isinstance(self.epsilon, (int, float)) or not math.isfinite(self.epsilon):
            raise ConfigError(f"epsilon must be a finite number, got {self.epsilon!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        unknown = set(self.outputs) - set(OUTPUT_KEYS)
        if unknown:
            raise ConfigError(f"unknown output keys: {sorted(unknown)}")
        try:
            self.pair
        except LandscapeError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def pair(self) -> MemoryPair:
        return MemoryPair.from_lists(self.xi1, self.xi2)

    @property
    def model(self) -> ModelConfig:
        return ModelConfig(self.pair, self.epsilon)

    def output(self, key: str, default: Optional[str] = None) -> Optional[Path]:
        value = self.outputs.get(key, default)
        return Path(value) if value else None

    def with_overrides(self, **scalars) -> "RunConfig":
        """Replace scalar fields (epsilon, format, census_cap, dt, t_max, stop_tol) when not None."""
        top = {k: v for k, v in scalars.items() if v is not None and k in ("epsilon", "format", "census_cap")}
        integ = {k: v for k, v in scalars.items() if v is not None and k in ("dt", "t_max", "stop_tol")}
        try:
            cfg = replace(self, **top)
            if integ:
                cfg = replace(cfg, integrator=replace(cfg.integrator, **integ))
        except LandscapeError as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    def to_dict(self) -> dict:
        return {
            "memories": [list(self.xi1), list(self.xi2)],
            "epsilon": self.epsilon,
            "integrator": {"dt": self.integrator.dt, "t_max": self.integrator.t_max,
                           "stop_tol": self.integrator.stop_tol},
            "census_cap": self.census_cap,
            "outputs": dict(self.outputs),
            "format": self.format,
        }


def _signs(raw, name) -> tuple[int, ...]:
    if not isinstance(raw, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
        raise ConfigError(f"{name} must be a list of integers")
    if any(v not in (-1, 1) for v in raw):
        raise ConfigError(f"{name} entries must be +1 or -1")
    return tuple(raw)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(data) - {"memories", "epsilon", "integrator", "census_cap", "outputs", "format"}
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    mems = data.get("memories")
    if not isinstance(mems, list) or len(mems) != 2:
        raise ConfigError("'memories' must hold exactly two arrays")
    if "epsilon" not in data:
        raise ConfigError("'epsilon' is required")
    eps = data["epsilon"]
    if isinstance(eps, bool) or not isinstance(eps, (int, float)):
        raise ConfigError("'epsilon' must be a number")
    integ = data.get("integrator", {})
    allowed = {f.name for f in fields(IntegrationConfig)} & {"dt", "t_max", "stop_tol"}
    if not isinstance(integ, dict) or set(integ) - allowed:
        raise ConfigError(f"'integrator' accepts only {sorted(allowed)}")
    try:
        icfg = IntegrationConfig(**{k: float(v) for k, v in integ.items()})
    except (LandscapeError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad integrator settings: {exc}") from exc
    cap = data.get("census_cap", DEFAULT_CAP)
    if isinstance(cap, bool) or not isinstance(cap, int) or cap < 1:
        raise ConfigError("'census_cap' must be a positive integer")
    outputs = data.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("'outputs' must be an object")
    return RunConfig(_signs(mems[0], "memories[0]"), _signs(mems[1], "memories[1]"),
                     float(eps), icfg, cap, dict(outputs), data.get("format", "text"))


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)
