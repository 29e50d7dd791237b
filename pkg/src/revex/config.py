"""Pipeline configuration: defaults, JSON config file, CLI overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from revex.corpusgen import DEFAULT_ALPHA, DEFAULT_BETA
from revex.errors import ConfigError
from revex.modelsel import GridSearchConfig

DEFAULT_ELEMENT_KIND = "inclusion_criteria"


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    element_kind: str = DEFAULT_ELEMENT_KIND
    grid: GridSearchConfig = field(default_factory=GridSearchConfig)
    binary_features: bool = False
    min_match_floor: float = 0.0
    seed: int = 0
    reviews: str | None = None
    articles: str | None = None
    corpus: str | None = None
    model: str | None = None
    report: str | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "min_match_floor"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")

    def to_json(self) -> dict:
        return asdict(self)


_GRID_KEYS = {f.name for f in fields(GridSearchConfig)}
_TOP_KEYS = {f.name for f in fields(PipelineConfig)}


def from_mapping(data: dict) -> PipelineConfig:
    unknown = set(data) - _TOP_KEYS - {"paths"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data = dict(data)
    data.update(data.pop("paths", {}) or {})
    grid = dict(data.pop("grid", {}) or {})
    bad = set(grid) - _GRID_KEYS
    if bad:
        raise ConfigError(f"unknown grid keys: {sorted(bad)}")
    if "seed" in data and "seed" not in grid:
        grid["seed"] = data["seed"]
    try:
        return PipelineConfig(grid=GridSearchConfig(**grid), **data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return from_mapping(data)


def with_overrides(cfg: PipelineConfig, top: dict, grid: dict) -> PipelineConfig:
    """Apply non-None overrides; flags always beat the config file."""
    top = {k: v for k, v in top.items() if v is not None}
    grid = {k: v for k, v in grid.items() if v is not None}
    if "seed" in top and "seed" not in grid:
        grid["seed"] = top["seed"]
    try:
        new_grid = replace(cfg.grid, **grid) if grid else cfg.grid
        return replace(cfg, grid=new_grid, **top)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
