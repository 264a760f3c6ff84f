"""File-based run configuration.

One JSON file can pin every tunable in the pipeline; command-line flags
override individual values. Unknown keys are rejected loudly, at every
nesting level, so a typo cannot silently fall back to a default.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .crawler import RateLimitPolicy
from .errors import ConfigError, IoFailure
from .mlp import MlpConfig
from .normalize import METHODS
from .synth import ClassProfile, SynthProfile


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    tff_threshold: float = 20.0
    normalization: str = "log-ratio"
    tweet_cap: int = 200
    checkpoint_every: int = 10
    mlp: MlpConfig = MlpConfig()
    rate_limit: RateLimitPolicy = RateLimitPolicy()
    synth: SynthProfile = SynthProfile()

    def __post_init__(self):
        if self.normalization not in METHODS:
            raise ConfigError(
                f"normalization must be one of {METHODS}, got {self.normalization!r}"
            )
        if self.tff_threshold <= 0:
            raise ConfigError("tff_threshold must be positive")
        if self.tweet_cap < 1:
            raise ConfigError("tweet_cap must be >= 1")
        if self.checkpoint_every < 1:
            raise ConfigError("checkpoint_every must be >= 1")


def _hydrate(cls, raw, path: str):
    """Build a dataclass from a dict, rejecting unknown keys recursively."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config section {path} must be an object, got {type(raw).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = set(raw) - set(known)
    if unknown:
        raise ConfigError(f"unknown config key(s) under {path}: {sorted(unknown)}")
    kwargs = {}
    for name, value in raw.items():
        target = _nested_dataclass(cls, name)
        if target is not None:
            kwargs[name] = _hydrate(target, value, f"{path}.{name}")
        elif isinstance(value, list):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config under {path}: {exc}") from exc


_NESTED = {
    (RunConfig, "mlp"): MlpConfig,
    (RunConfig, "rate_limit"): RateLimitPolicy,
    (RunConfig, "synth"): SynthProfile,
    (SynthProfile, "bot"): ClassProfile,
    (SynthProfile, "human"): ClassProfile,
}


def _nested_dataclass(cls, field_name: str):
    return _NESTED.get((cls, field_name))


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read config from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return _hydrate(RunConfig, raw, path="config")


def with_seed(config: RunConfig, seed: int) -> RunConfig:
    """Thread one seed through every seeded component."""
    return replace(config, seed=seed, mlp=replace(config.mlp, seed=seed))
