"""Regression error metrics and nonparametric bootstrap confidence intervals.

Prediction pairs with a non-finite value are dropped before computing
metrics; a result is only defined when at least two pairs remain and the
retained targets have nonzero variance. This is how interpolants with
restricted support (NaN outside the hull) feed into the benchmark's
valid-run accounting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

__all__ = ["MetricSet", "BootstrapCI", "compute_metrics", "bootstrap_ci"]

DEFAULT_RESAMPLES = 1000
DEFAULT_LEVEL = 0.95


@dataclass(frozen=True)
class MetricSet:
    """RMSE, MAE and R^2 over the retained (finite) prediction pairs."""

    rmse: float
    mae: float
    r2: float
    n_points: int


def compute_metrics(y_true, y_pred) -> MetricSet | None:
    """Error metrics over finite prediction pairs, or None when undefined.

    Undefined means fewer than 2 finite pairs remain after dropping
    non-finite predictions, or the retained targets are constant (zero
    variance, so R^2 has no meaning).
    """
    yt = np.asarray(y_true, dtype=float)
    yp = np.asarray(y_pred, dtype=float)
    if yt.shape != yp.shape:
        raise ValueError(f"length mismatch: {yt.shape} vs {yp.shape}")
    keep = np.isfinite(yt) & np.isfinite(yp)
    yt, yp = yt[keep], yp[keep]
    n = yt.size
    if n < 2:
        return None
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        return None
    err = yt - yp
    ss_res = float(err @ err)
    return MetricSet(
        rmse=float(np.sqrt(ss_res / n)),
        mae=float(np.mean(np.abs(err))),
        r2=1.0 - ss_res / ss_tot,
        n_points=int(n),
    )


@dataclass(frozen=True)
class BootstrapCI:
    """Percentile bootstrap interval for the mean of a sample."""

    point_estimate: float
    lower: float
    upper: float
    resamples: int
    level: float


def _resample_means(samples: np.ndarray, resamples: int, seed) -> np.ndarray:
    """Means of ``resamples`` with-replacement resamples (seeded, counter-based)."""
    rng = Generator(Philox(SeedSequence(seed)))
    idx = rng.integers(0, samples.size, size=(resamples, samples.size))
    return samples[idx].mean(axis=1)


def bootstrap_ci(
    samples,
    resamples: int = DEFAULT_RESAMPLES,
    level: float = DEFAULT_LEVEL,
    seed=0,
) -> BootstrapCI | None:
    """Percentile CI for the mean from with-replacement resampling.

    Returns None for an empty sample. Deterministic for a fixed seed; the
    seed may be an int or a tuple of ints.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        return None
    if resamples < 1:
        raise ValueError(f"resamples must be >= 1, got {resamples}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    means = _resample_means(arr, resamples, seed)
    alpha = 1.0 - level
    lower, upper = np.percentile(means, [100.0 * alpha / 2.0, 100.0 * (1.0 - alpha / 2.0)])
    return BootstrapCI(
        point_estimate=float(arr.mean()),
        lower=float(lower),
        upper=float(upper),
        resamples=int(resamples),
        level=float(level),
    )
