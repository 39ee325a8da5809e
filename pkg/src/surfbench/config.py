"""Experiment configuration: one flat record of every benchmark setting.

The same key set appears in three places and must stay aligned: the
``ExperimentConfig`` fields, config files passed to the CLI (JSON object or
``settings.csv`` key/value rows), and the ``settings.csv`` artifact written
next to experiment results. ``settings.csv`` round-trips: parsing it back
yields a config equal to the one used.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, fields
from pathlib import Path

from .rbf import RbfConfig
from .synthdata import NoiseSpec

__all__ = ["ExperimentConfig", "load_config"]

CUBIC_METHOD = "clough_tocher"


@dataclass(frozen=True)
class ExperimentConfig:
    random_seed: int = 42
    repeats_per_slice: int = 40
    train_fraction: float = 0.7
    bootstrap_resamples: int = 1000
    rbf_kernel: str = "multiquadric"
    rbf_smoothing: float = 0.0
    rbf_epsilon: float = 1.0
    cubic_interpolator: str = CUBIC_METHOD
    noise_sigma_output1: float = 0.1
    noise_sigma_output2: float = 1.0
    noise_sigma_output3: float = 2.0
    grid_resolution: int = 50

    def __post_init__(self):
        if self.repeats_per_slice < 1:
            raise ValueError("repeats_per_slice must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.bootstrap_resamples < 1:
            raise ValueError("bootstrap_resamples must be >= 1")
        if self.cubic_interpolator != CUBIC_METHOD:
            raise ValueError(
                f"unsupported cubic_interpolator {self.cubic_interpolator!r}; "
                f"only {CUBIC_METHOD!r} is implemented"
            )
        if self.grid_resolution < 2:
            raise ValueError("grid_resolution must be >= 2")
        # Kernel/epsilon/smoothing bounds are enforced by RbfConfig.
        self.rbf_config()

    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec(
            sigma1=self.noise_sigma_output1,
            sigma2=self.noise_sigma_output2,
            sigma3=self.noise_sigma_output3,
            master_seed=self.random_seed,
        )

    def rbf_config(self) -> RbfConfig:
        return RbfConfig(
            kernel=self.rbf_kernel,
            epsilon=self.rbf_epsilon,
            smoothing=self.rbf_smoothing,
        )

    def to_rows(self) -> list[tuple[str, str]]:
        """(key, value) rows in field order, with full float precision."""
        rows = []
        for f in fields(self):
            v = getattr(self, f.name)
            rows.append((f.name, "%.17g" % v if isinstance(v, float) else str(v)))
        return rows

    def sha256(self) -> str:
        text = "\n".join(f"{k}={v}" for k, v in self.to_rows())
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        kwargs = {}
        known = {f.name: f.type for f in fields(cls)}
        casts = {"int": int, "float": float, "str": str}
        for key, value in mapping.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[key] = casts[known[key]](value)
        return cls(**kwargs)

    def write_settings_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["key", "value"])
            writer.writerows(self.to_rows())

    @classmethod
    def from_settings_csv(cls, path) -> "ExperimentConfig":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["key", "value"]:
                raise ValueError(f"{path}: expected settings header 'key,value'")
            return cls.from_mapping({k: v for k, v in reader})


def load_config(path) -> ExperimentConfig:
    """Load a config from a JSON object file or a settings.csv file."""
    p = Path(path)
    if p.suffix == ".csv":
        return ExperimentConfig.from_settings_csv(p)
    with open(p) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config file must hold a flat JSON object")
    return ExperimentConfig.from_mapping(data)
