"""Run configuration: loading, validation, canonical serialization.

Configs are TOML (JSON accepted); every field has a default except prompts
and seeds, so small files stay small.  ``to_dict``/``from_dict`` round-trip
losslessly, and ``config_hash`` fingerprints the canonical JSON form for
report provenance.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from ..diffusion import (
    DEFAULT_BETA_MAX,
    DEFAULT_BETA_MIN,
    DEFAULT_T_SAMPLE,
    DEFAULT_T_TRAIN,
)
from ..diffusion.denoiser import DEFAULT_BETA_ADD, DEFAULT_GAMMA
from ..diffusion.embeddings import EMBED_DIM
from ..errors import ConfigError
from ..perturb import PerturbationSpec, severity_defaults
from ..tuning import TuningConfig
from ..watermark import DEFAULT_CHANNEL, DEFAULT_RADIUS, DEFAULT_THRESHOLD

OUTPUT_DIR_ENV = "PTMARK_OUTPUT_DIR"
KEYS_DIR_ENV = "PTMARK_KEYS_DIR"


@dataclass(frozen=True)
class DenoiserConfig:
    seed: int = 1234
    channels: int = 4
    height: int = 64
    width: int = 64
    embed_dim: int = EMBED_DIM
    gamma: float = DEFAULT_GAMMA
    beta_add: float = DEFAULT_BETA_ADD


@dataclass(frozen=True)
class ScheduleConfig:
    t_train: int = DEFAULT_T_TRAIN
    beta_min: float = DEFAULT_BETA_MIN
    beta_max: float = DEFAULT_BETA_MAX
    t_sample: int = DEFAULT_T_SAMPLE


@dataclass(frozen=True)
class KeyConfig:
    seed: int = 99
    radius: int = DEFAULT_RADIUS
    channel: int = DEFAULT_CHANNEL


@dataclass(frozen=True)
class AblationGrids:
    lambda1: List[float] = field(default_factory=lambda: [0.50, 1.00, 1.50, 2.00])
    lambda2: List[float] = field(default_factory=lambda: [0.0003, 0.0005, 0.0007])
    n_iters: List[int] = field(default_factory=lambda: [5, 10, 15, 20])
    start_step: List[int] = field(default_factory=lambda: [0, 10, 25, 40])


@dataclass(frozen=True)
class RunConfig:
    prompts: List[str]
    seeds: List[int]
    denoiser: DenoiserConfig = DenoiserConfig()
    schedule: ScheduleConfig = ScheduleConfig()
    key: KeyConfig = KeyConfig()
    tuning: TuningConfig = TuningConfig()
    ablation: AblationGrids = AblationGrids()
    perturbations: List[PerturbationSpec] = field(default_factory=list)
    threshold: float = DEFAULT_THRESHOLD
    threads: int = 1
    output_dir: str = ""

    def __post_init__(self):
        if not self.prompts:
            raise ConfigError("config needs at least one prompt")
        if not self.seeds:
            raise ConfigError("config needs at least one seed")
        if not self.perturbations:
            object.__setattr__(self, "perturbations",
                               severity_defaults(self.schedule.t_sample))
        if not self.output_dir:
            object.__setattr__(self, "output_dir",
                               os.environ.get(OUTPUT_DIR_ENV, "ptmark-out"))

    def to_dict(self) -> dict:
        return {
            "prompts": list(self.prompts),
            "seeds": list(self.seeds),
            "denoiser": dataclasses.asdict(self.denoiser),
            "schedule": dataclasses.asdict(self.schedule),
            "key": dataclasses.asdict(self.key),
            "tuning": dataclasses.asdict(self.tuning),
            "ablation": dataclasses.asdict(self.ablation),
            "perturbations": [p.to_dict() for p in self.perturbations],
            "threshold": self.threshold,
            "threads": self.threads,
            "output_dir": self.output_dir,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def replace_tuning(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, tuning=dataclasses.replace(self.tuning, **kwargs))


def _build(cls, data: dict, where: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown {where} fields: {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad {where} section: {exc}") from None


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a table, got {type(data).__name__}")
    data = dict(data)
    try:
        prompts = [str(p) for p in data.pop("prompts")]
        seeds = [int(s) for s in data.pop("seeds")]
    except KeyError as exc:
        raise ConfigError(f"config is missing required field {exc}") from None
    kwargs = dict(
        prompts=prompts,
        seeds=seeds,
        denoiser=_build(DenoiserConfig, data.pop("denoiser", {}), "denoiser"),
        schedule=_build(ScheduleConfig, data.pop("schedule", {}), "schedule"),
        key=_build(KeyConfig, data.pop("key", {}), "key"),
        tuning=_build(TuningConfig, data.pop("tuning", {}), "tuning"),
        ablation=_build(AblationGrids, data.pop("ablation", {}), "ablation"),
    )
    if "perturbations" in data:
        kwargs["perturbations"] = [PerturbationSpec.from_dict(p)
                                   for p in data.pop("perturbations")]
    for name in ("threshold", "threads", "output_dir"):
        if name in data:
            kwargs[name] = data.pop(name)
    if data:
        raise ConfigError(f"unknown config fields: {sorted(data)}")
    return RunConfig(**kwargs)


def load_config(path: str) -> RunConfig:
    """Load a TOML or JSON config file."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    text = p.read_text()
    if p.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        try:
            import tomllib  # Python >= 3.11
        except ImportError:
            import tomli as tomllib
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError:
            # JSON content without a .json suffix is accepted too.
            try:
                data = json.loads(text)
            except json.JSONDecodeError:
                raise ConfigError(f"could not parse {path} as TOML or JSON") from None
    return config_from_dict(data)


def default_keys_dir(explicit: Optional[str] = None) -> Path:
    return Path(explicit or os.environ.get(KEYS_DIR_ENV, "keys"))
