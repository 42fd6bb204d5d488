"""Run configuration: a YAML file with command-line overrides."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml

from .dataset import RESIZE_TARGETS
from .errors import ConfigError
from .jpeg import check_level

CACHE_ENV = "SEQVPR_CACHE"

# fields that locate outputs but do not change results
_UNHASHED = {"out"}


@dataclass(frozen=True)
class RunConfig:
    query_manifest: str | None = None
    reference_manifest: str | None = None
    dataset_name: str = "dataset"
    resize: int = 256
    techniques: tuple = ("hog",)
    levels: tuple = (0, 50, 90, 95, 99)
    q_levels: tuple | None = None
    map_levels: tuple | None = None
    tolerance: int = 0
    k_max: int | None = None
    repeats: int = 1
    out: str = "seqvpr-out"
    seed: int = 0
    external_dir: str | None = None
    t_e: float | None = None
    t_m: float | None = None
    t_c: float | None = None
    k: int = 1
    q_level: int | None = None
    map_level: int | None = None

    def __post_init__(self):
        if self.resize not in RESIZE_TARGETS:
            raise ConfigError(f"resize must be one of {RESIZE_TARGETS}")
        object.__setattr__(self, "techniques", tuple(self.techniques))
        for t in self.techniques:
            parse_technique(t)
        for name in ("levels", "q_levels", "map_levels"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(check_level(x) for x in v))
        for name in ("q_level", "map_level"):
            v = getattr(self, name)
            if v is not None:
                check_level(v)
        if self.tolerance < 0:
            raise ConfigError("tolerance must be >= 0")
        if self.k_max is not None and self.k_max < 1:
            raise ConfigError("k-max must be >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        for name in ("t_e", "t_m", "t_c"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise ConfigError(f"{name} must be non-negative")

    @property
    def grid_q_levels(self):
        return self.q_levels if self.q_levels is not None else self.levels

    @property
    def grid_map_levels(self):
        return self.map_levels if self.map_levels is not None else self.levels

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    @property
    def cache_dir(self) -> Path:
        env = os.environ.get(CACHE_ENV)
        return Path(env) if env else self.out_dir / "cache"

    def config_hash(self) -> str:
        d = {k: v for k, v in asdict(self).items() if k not in _UNHASHED}
        blob = json.dumps(d, sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def parse_technique(name: str):
    """Return ('hog', None) or ('external', '<name>')."""
    if name == "hog":
        return "hog", None
    if name.startswith("external:") and len(name) > len("external:"):
        return "external", name.split(":", 1)[1]
    raise ConfigError(f"technique must be 'hog' or 'external:<name>', got {name!r}")


def parse_levels(text: str):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad level list {text!r}") from exc


def load_config(path=None, **overrides) -> RunConfig:
    data = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a mapping")
        if "technique" in data and "techniques" not in data:
            data["techniques"] = data.pop("technique")
        if isinstance(data.get("techniques"), str):
            data["techniques"] = [data["techniques"]]
        # manifest paths in a config file are relative to the file
        for key in ("query_manifest", "reference_manifest", "external_dir"):
            if data.get(key) is not None:
                data[key] = str((path.parent / data[key]))
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = RunConfig(**data)
        return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
