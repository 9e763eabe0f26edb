"""
Configuration loading: YAML defaults merged with an optional user file.
"""

import logging
import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "default.yaml"


@dataclass(frozen=True)
class Budgets:
    """Explicit work limits."""
    max_subsets: int = 2_000_000
    max_challenges: int = 50_000_000
    max_witness_scans: int = 500_000_000
    max_dedekind_k: int = 6
    max_rank_cells: int = 50_000_000
    factor_trial_limit: int = 100_000_000
    max_simplex_size: int = 12
    charsum_max_q: int = 1_000_000
    max_simplices: int = 20_000_000


@dataclass(frozen=True)
class FieldSettings:
    dlog_cap: int = 1 << 24
    exhaustive_x_cap: int = 1 << 20
    x_trials_factor: int = 200


@dataclass(frozen=True)
class SolverSettings:
    max_r: int = 4


@dataclass(frozen=True)
class SamplingSettings:
    trials: int = 10_000
    witness_trials: int = 200_000
    loop_trials: int = 1_000


@dataclass(frozen=True)
class ParallelSettings:
    workers: int = 1


@dataclass(frozen=True)
class OutputSettings:
    verbose: bool = False
    timing: bool = False


@dataclass(frozen=True)
class Settings:
    """Complete runtime configuration."""
    budgets: Budgets = dataclasses.field(default_factory=Budgets)
    field: FieldSettings = dataclasses.field(default_factory=FieldSettings)
    solver: SolverSettings = dataclasses.field(default_factory=SolverSettings)
    sampling: SamplingSettings = dataclasses.field(default_factory=SamplingSettings)
    parallel: ParallelSettings = dataclasses.field(default_factory=ParallelSettings)
    output: OutputSettings = dataclasses.field(default_factory=OutputSettings)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Settings":
        """Build settings from a nested mapping, rejecting unknown keys."""
        sections = {f.name: f for f in fields(cls)}
        kwargs = {}
        for name, value in (data or {}).items():
            if name not in sections:
                raise ConfigError(f"unknown configuration section '{name}'")
            if not isinstance(value, dict):
                raise ConfigError(f"section '{name}' must be a mapping")
            section_type = sections[name].default_factory  # type: ignore[misc]
            known = {f.name for f in fields(section_type)}
            unknown = set(value) - known
            if unknown:
                raise ConfigError(
                    f"unknown key(s) in '{name}': {', '.join(sorted(unknown))}"
                )
            kwargs[name] = section_type(**value)
        return cls(**kwargs)


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with path.open("r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read configuration {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"configuration {path} must be a mapping")
    return data


def load_settings(config_path: Optional[Union[str, Path]] = None) -> Settings:
    """Load the shipped defaults and merge a user configuration over them."""
    data = _read_yaml(DEFAULT_CONFIG_PATH) if DEFAULT_CONFIG_PATH.exists() else {}
    if config_path is not None:
        user_path = Path(config_path)
        logger.debug("merging configuration from %s", user_path)
        data = _deep_merge(data, _read_yaml(user_path))
    return Settings.from_dict(data)
