from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Literal

from platformdirs import user_config_dir

CONFIG_ENV = "DIAGFORGE_CONFIG"

OutputFormat = Literal["text", "json"]
_FORMATS = ("text", "json")
_POSITIVE = (
    "step_budget",
    "space",
    "clock_cap",
    "pr_max_steps",
    "pr_max_bits",
    "exact_max_steps",
    "workers",
    "sample_size",
)


class ConfigError(ValueError):
    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class WorkbenchConfig:
    step_budget: int = 100_000
    space: int = 16
    clock_cap: int = 4
    pr_max_steps: int = 10_000_000
    pr_max_bits: int = 1_000_000
    exact_max_steps: int = 10_000_000
    sweep_range: str = "0..100"
    workers: int = 4
    output_format: OutputFormat = "text"
    seed: int = 0
    sample_size: int = 64

    def __post_init__(self) -> None:
        for key in _POSITIVE:
            value = getattr(self, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(key, f"must be a positive integer, got {value!r}")
        if self.output_format not in _FORMATS:
            raise ConfigError("output_format", f"must be one of {', '.join(_FORMATS)}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed", f"must be an integer, got {self.seed!r}")
        if not isinstance(self.sweep_range, str):
            raise ConfigError("sweep_range", "must be a string like 0..100")

    def with_overrides(self, **overrides: Any) -> WorkbenchConfig:
        """Apply command-line values; None means the flag was not given."""
        given = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **given)


def default_config_path() -> Path:
    return Path(user_config_dir("diagforge", "diagforge")) / "config.json"


class ConfigStore:
    def __init__(self, path: Path) -> None:
        self._path = path
        self._lock = threading.RLock()
        self._data: dict[str, Any] = self._load()

    @property
    def path(self) -> Path:
        return self._path

    def get_config(self) -> WorkbenchConfig:
        with self._lock:
            known = {f.name for f in fields(WorkbenchConfig)}
            unknown = sorted(set(self._data) - known)
            if unknown:
                raise ConfigError(unknown[0], f"unknown setting in {self._path}")
            return WorkbenchConfig(**self._data)

    def set_config(self, config: WorkbenchConfig) -> None:
        with self._lock:
            self._data = {f.name: getattr(config, f.name) for f in fields(WorkbenchConfig)}
            self._save(self._data)

    def _load(self) -> dict[str, Any]:
        if not self._path.exists():
            return {}
        try:
            text = self._path.read_text(encoding="utf-8")
        except OSError:
            return {}
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            return {}
        return obj if isinstance(obj, dict) else {}

    def _save(self, data: dict[str, Any]) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self._path.with_suffix(self._path.suffix + ".tmp")
        tmp.write_text(json.dumps(data, ensure_ascii=False, indent=2), encoding="utf-8")
        tmp.replace(self._path)


def resolve_config_path(explicit: str | os.PathLike[str] | None = None) -> Path | None:
    if explicit:
        return Path(explicit)
    env = os.environ.get(CONFIG_ENV, "").strip()
    if env:
        return Path(env)
    path = default_config_path()
    return path if path.exists() else None


def load_config(explicit: str | os.PathLike[str] | None = None) -> WorkbenchConfig:
    path = resolve_config_path(explicit)
    if path is None:
        return WorkbenchConfig()
    return ConfigStore(path).get_config()
