"""Run configuration: defaults, TOML loading, and flag overrides.

Defaults follow the standard recipe: k = 25 features per set, preliminary
pool of 5000 candidates narrowed to the top 1000, Q = 8 reward-supervised
candidates, 80 warm-start epochs with 50 random sets per subject, and a
10-step probe. Config files are flat TOML (sections allowed, keys unique
across sections); explicit CLI flags override file values.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError

_INT_FIELDS = {
    "k",
    "p0_size",
    "pool_m",
    "q",
    "stage1_epochs",
    "stage1_sets_per_subject",
    "stage2_epochs",
    "subject_batch",
    "n_support",
    "n_query",
    "probe_steps",
    "ensemble_size",
    "seed",
}
_FLOAT_FIELDS = {"lambda_scr", "train_fraction"}


@dataclass
class RetrievalConfig:
    k: int = 25
    p0_size: int = 5000
    pool_m: int = 1000
    q: int = 8
    stage1_epochs: int = 80
    stage1_sets_per_subject: int = 50
    stage2_epochs: int = 25
    subject_batch: int = 8
    n_support: int = 24
    n_query: int = 24
    probe_steps: int = 10
    lambda_scr: float = 1.0
    ensemble_size: int = 3
    train_fraction: float = 0.8
    seed: int = 0

    def validate(self, n_features: int | None = None) -> "RetrievalConfig":
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.pool_m > self.p0_size:
            raise ConfigError(f"pool_m {self.pool_m} exceeds p0_size {self.p0_size}")
        if self.q > self.pool_m:
            raise ConfigError(f"q {self.q} exceeds pool_m {self.pool_m}")
        if n_features is not None and self.k > n_features:
            raise ConfigError(f"k {self.k} exceeds feature pool size {n_features}")
        for name in (
            "p0_size",
            "pool_m",
            "q",
            "stage1_epochs",
            "stage1_sets_per_subject",
            "stage2_epochs",
            "subject_batch",
            "n_support",
            "n_query",
            "ensemble_size",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.probe_steps < 0:
            raise ConfigError("probe_steps must be >= 0")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        if self.lambda_scr < 0.0 or not math.isfinite(self.lambda_scr):
            raise ConfigError("lambda_scr must be finite and >= 0")
        if self.ensemble_size > 3:
            raise ConfigError("ensemble_size is capped at 3 (top-3 ensembling)")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def config_from_mapping(mapping: dict) -> RetrievalConfig:
    """Build a config from flat key/value pairs, with type checking."""
    known = {f.name for f in dataclasses.fields(RetrievalConfig)}
    values: dict = {}
    for key, value in mapping.items():
        if key not in known:
            raise ConfigError(f"unknown config key: {key}")
        if key in _INT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"config key {key} must be an integer, got {value!r}")
            values[key] = int(value)
        elif key in _FLOAT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"config key {key} must be a number, got {value!r}")
            values[key] = float(value)
    return RetrievalConfig(**values)


def _flatten(doc: dict) -> dict:
    flat: dict = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            for inner_key, inner_value in value.items():
                if isinstance(inner_value, dict):
                    raise ConfigError(f"config nesting deeper than one section: {key}.{inner_key}")
                if inner_key in flat:
                    raise ConfigError(f"duplicate config key across sections: {inner_key}")
                flat[inner_key] = inner_value
        else:
            if key in flat:
                raise ConfigError(f"duplicate config key: {key}")
            flat[key] = value
    return flat


def load_config(path: str | Path) -> RetrievalConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc
    return config_from_mapping(_flatten(doc))


def config_to_toml(config: RetrievalConfig) -> str:
    """Human-diffable record of the exact settings a run used."""
    lines = ["[retrieval]"]
    for f in dataclasses.fields(RetrievalConfig):
        lines.append(f"{f.name} = {getattr(config, f.name)}")
    return "\n".join(lines) + "\n"
