"""Run parameters: command-line flags over a YAML run file over defaults."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from .models import InputError, Order
from .spectrum import BROADENING_MODES, EXACT_METHODS


class ConfigError(InputError):
    """Raised when run configuration is invalid."""


@dataclass(frozen=True)
class RunConfig:
    order: Order | None = None
    tau: float = 1e-2
    taus: tuple[float, ...] = (1e-1, 3e-2, 1e-2)
    cutoff: int = 3
    axes: tuple[str, ...] | None = None
    shots: int = 100_000
    seed: int = 0
    broaden_width: float | None = None
    broaden_mode: str = "sigma"
    grid_step: float = 1.0
    exact_method: str = "auto"

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RunConfig":
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown run configuration keys: {', '.join(unknown)}")
        return cls().merged(data)

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Return a copy with every non-None override applied and checked."""
        values = {key: value for key, value in overrides.items() if value is not None}
        try:
            if "order" in values:
                values["order"] = Order.parse(values["order"])
            if "tau" in values:
                values["tau"] = float(values["tau"])
            if "taus" in values:
                values["taus"] = tuple(float(tau) for tau in _as_list(values["taus"]))
            if "cutoff" in values:
                values["cutoff"] = _as_int(values["cutoff"], "cutoff")
            if "axes" in values:
                values["axes"] = tuple(str(axis).strip().lower() for axis in _as_list(values["axes"]))
            if "shots" in values:
                values["shots"] = _as_int(values["shots"], "shots")
            if "seed" in values:
                values["seed"] = _as_int(values["seed"], "seed")
            if "broaden_width" in values:
                values["broaden_width"] = float(values["broaden_width"])
            if "grid_step" in values:
                values["grid_step"] = float(values["grid_step"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

        config = replace(self, **values)
        config.check()
        return config

    def check(self) -> None:
        if self.tau <= 0.0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if len(self.taus) < 3 or any(tau <= 0.0 for tau in self.taus):
            raise ConfigError("taus needs at least three positive values")
        if self.cutoff < 0:
            raise ConfigError("cutoff must be non-negative")
        if self.shots < 1:
            raise ConfigError("shots must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.broaden_width is not None and self.broaden_width <= 0.0:
            raise ConfigError("broaden_width must be positive")
        if self.broaden_mode not in BROADENING_MODES:
            raise ConfigError(f"broaden_mode must be one of {', '.join(BROADENING_MODES)}")
        if self.grid_step <= 0.0:
            raise ConfigError("grid_step must be positive")
        if self.exact_method not in EXACT_METHODS:
            raise ConfigError(f"exact_method must be one of {', '.join(EXACT_METHODS)}")


def load_run_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    target = Path(path).expanduser()
    try:
        data = yaml.safe_load(target.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read run configuration {target}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"run configuration {target} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("run configuration must be a YAML object")
    return RunConfig.from_mapping(data)


def parse_float_list(raw: str) -> list[float]:
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise ConfigError(f"invalid number list: {raw}") from exc


def _as_list(value: Any) -> list[Any]:
    if isinstance(value, str):
        return [item for item in value.split(",") if item.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    raise ConfigError(f"expected a list or comma-separated string, got {value!r}")


def _as_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return int(value)
