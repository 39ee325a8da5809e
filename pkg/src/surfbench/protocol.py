"""The paired evaluation protocol: slices, repeated splits, matched fits.

The three-input dataset is cut into 2D tasks by fixing one input at one of
its design levels (11 slices for the default 4/4/3 design), crossed with the
three outputs and the two observation regimes. Each task is split into
train/test subsets ``repeats_per_slice`` times; both interpolants are fitted
on exactly the same training nodes and scored on exactly the same test
nodes, so method contrasts isolate interpolation behavior.

Every (task, repeat) split is seeded by a hash of its identity tuple, never
by call order: results are independent of execution order and safe to
parallelize. Fit failures and undefined metrics become invalid run records
with a reason code; they never abort the experiment.

A run is valid only when its method produced a finite prediction at every
test point and the metrics are defined (at least two test points, nonzero
target variance). Interpolants with restricted support (the cubic surface is
undefined outside the training hull) therefore lose runs whenever a split
pushes any test point off their support, which is what drives the asymmetric
valid-run counts between the two methods.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .config import ExperimentConfig
from .cubic import fit_cubic
from .errors import InsufficientNodes, InterpolationError, reason_code
from .metrics import MetricSet, compute_metrics
from .rbf import RbfConfig, eval_rbf, fit_rbf
from .synthdata import FactorialDataset

__all__ = [
    "REGIMES",
    "AXES",
    "METHODS",
    "SliceTask",
    "SplitPlan",
    "RunRecord",
    "enumerate_slices",
    "make_splits",
    "run_pair",
    "method_contrast",
    "execute_experiment",
    "valid_run_counts",
]

log = logging.getLogger(__name__)

REGIMES = ("noise-free", "noisy")
AXES = ("x1", "x2", "x3")
METHODS = ("cubic", "rbf")

MIN_SLICE_SIZE = 5
MIN_TRAIN_SIZE = 3

# Domain tag separating split seeding from the noise stream (tag 1).
_SPLIT_STREAM_TAG = 2


@dataclass(frozen=True)
class SliceTask:
    """One 2D interpolation problem cut from the factorial dataset."""

    regime: str
    output_index: int  # 1-based, matching the output naming
    fixed_axis: str
    fixed_level: float
    level_index: int
    free_axes: tuple[str, str]
    points: np.ndarray  # (n, 2) free-axis coordinates
    values: np.ndarray  # (n,) targets from the regime's channel
    row_ids: np.ndarray  # (n,) row indices into the source dataset

    def __post_init__(self):
        for arr in (self.points, self.values, self.row_ids):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SplitPlan:
    """One train/test partition of a slice, with its seed derivation."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    repeat_index: int
    seed_derivation: tuple

    def __post_init__(self):
        self.train_indices.setflags(write=False)
        self.test_indices.setflags(write=False)


@dataclass(frozen=True)
class RunRecord:
    """One (regime, output, slice, repeat, method) evaluation."""

    regime: str
    output_index: int
    fixed_axis: str
    fixed_level: float
    level_index: int
    repeat: int
    method: str
    valid: bool
    reason: str
    n_test: int
    n_finite: int
    metrics: MetricSet | None
    y_true: np.ndarray
    y_pred: np.ndarray
    train_indices: np.ndarray
    test_indices: np.ndarray


def enumerate_slices(dataset: FactorialDataset, regime: str) -> list[SliceTask]:
    """All slice tasks of a regime: (axis, level, output) in a fixed order.

    For the default design this is (4 + 4 + 3) slices x 3 outputs = 33 tasks.
    Targets come from the clean channel in the noise-free regime and from the
    noisy channel otherwise.
    """
    outputs = dataset.outputs(regime)
    tasks = []
    for axis_idx, axis in enumerate(AXES):
        free = tuple(a for a in AXES if a != axis)
        free_idx = [AXES.index(a) for a in free]
        for level_index, level in enumerate(dataset.spec.axis_levels(axis)):
            rows = np.nonzero(dataset.x[:, axis_idx] == level)[0]
            points = dataset.x[np.ix_(rows, free_idx)]
            for output_index in (1, 2, 3):
                tasks.append(SliceTask(
                    regime=regime,
                    output_index=output_index,
                    fixed_axis=axis,
                    fixed_level=float(level),
                    level_index=level_index,
                    free_axes=free,
                    points=points.copy(),
                    values=outputs[rows, output_index - 1].copy(),
                    row_ids=rows.copy(),
                ))
    return tasks


def _train_size(n: int, alpha: float) -> int:
    size = int(np.floor(alpha * n + 0.5))  # round half up
    return min(max(size, MIN_TRAIN_SIZE), n - 1)


def make_splits(
    task: SliceTask,
    repeats: int,
    alpha: float,
    master_seed: int,
) -> list[SplitPlan]:
    """Seeded train/test partitions of a slice, |train| = round(alpha * n).

    Each repeat draws from its own stream keyed by
    (master_seed, regime, output, axis, level, repeat), so plans do not
    depend on generation order.
    """
    n = task.n
    if n < MIN_SLICE_SIZE:
        raise InsufficientNodes(f"slice has {n} points; need >= {MIN_SLICE_SIZE}")
    n_train = _train_size(n, alpha)
    plans = []
    for repeat in range(repeats):
        derivation = (
            master_seed,
            _SPLIT_STREAM_TAG,
            REGIMES.index(task.regime),
            task.output_index,
            AXES.index(task.fixed_axis),
            task.level_index,
            repeat,
        )
        rng = Generator(Philox(SeedSequence(derivation)))
        perm = rng.permutation(n)
        plans.append(SplitPlan(
            train_indices=np.sort(perm[:n_train]),
            test_indices=np.sort(perm[n_train:]),
            repeat_index=repeat,
            seed_derivation=derivation,
        ))
    return plans


def _make_record(task, plan, method, y_pred, reason=None) -> RunRecord:
    y_true = task.values[plan.test_indices]
    n_test = int(y_true.size)
    if y_pred is None:
        y_pred = np.full(n_test, np.nan)
        n_finite = 0
        metrics = None
    else:
        n_finite = int(np.count_nonzero(np.isfinite(y_pred)))
        # A run is valid only when the method produced a finite prediction at
        # every test point; partial hull coverage invalidates the run rather
        # than scoring it on the covered subset.
        if n_finite < n_test:
            metrics = None
            reason = "test_points_outside_support"
        else:
            metrics = compute_metrics(y_true, y_pred)
            if metrics is None and reason is None:
                reason = (
                    "too_few_test_points" if n_test < 2 else "zero_target_variance"
                )
    return RunRecord(
        regime=task.regime,
        output_index=task.output_index,
        fixed_axis=task.fixed_axis,
        fixed_level=task.fixed_level,
        level_index=task.level_index,
        repeat=plan.repeat_index,
        method=method,
        valid=metrics is not None,
        reason="ok" if metrics is not None else reason,
        n_test=n_test,
        n_finite=n_finite,
        metrics=metrics,
        y_true=y_true,
        y_pred=np.asarray(y_pred, dtype=float),
        train_indices=plan.train_indices,
        test_indices=plan.test_indices,
    )


def run_pair(task: SliceTask, plan: SplitPlan, rbf_config: RbfConfig) -> tuple[RunRecord, RunRecord]:
    """Fit and score both methods on identical train/test geometry.

    Fit failures yield invalid records with a reason code; cubic predictions
    outside the training hull are NaN and fall under the metrics validity
    rule. Nothing raises for expected degeneracies.
    """
    train_pts = task.points[plan.train_indices]
    train_vals = task.values[plan.train_indices]
    test_pts = task.points[plan.test_indices]

    try:
        cubic_surface = fit_cubic(train_pts, train_vals)
        cubic_record = _make_record(task, plan, "cubic", cubic_surface.evaluate(test_pts))
    except InterpolationError as exc:
        cubic_record = _make_record(task, plan, "cubic", None, reason=f"fit_failed:{reason_code(exc)}")

    try:
        rbf_surface = fit_rbf(train_pts, train_vals, rbf_config)
        rbf_record = _make_record(task, plan, "rbf", eval_rbf(rbf_surface, test_pts))
    except InterpolationError as exc:
        rbf_record = _make_record(task, plan, "rbf", None, reason=f"fit_failed:{reason_code(exc)}")

    return cubic_record, rbf_record


def method_contrast(cubic_record: RunRecord, rbf_record: RunRecord, metric: str = "rmse") -> float | None:
    """metric(rbf) - metric(cubic) on the shared test set; None unless both valid."""
    if not (cubic_record.valid and rbf_record.valid):
        return None
    return getattr(rbf_record.metrics, metric) - getattr(cubic_record.metrics, metric)


def execute_experiment(dataset: FactorialDataset, config: ExperimentConfig | None = None) -> list[RunRecord]:
    """The full run table: regimes x tasks x repeats x methods.

    A pure function of (dataset, config); rerunning yields identical records.
    Slices too small to split are skipped with a log message.
    """
    config = config if config is not None else ExperimentConfig()
    rbf_config = config.rbf_config()
    records: list[RunRecord] = []
    for regime in REGIMES:
        for task in enumerate_slices(dataset, regime):
            try:
                plans = make_splits(
                    task, config.repeats_per_slice, config.train_fraction, config.random_seed
                )
            except InsufficientNodes as exc:
                log.warning(
                    "skipping slice %s=%g output %d (%s): %s",
                    task.fixed_axis, task.fixed_level, task.output_index, regime, exc,
                )
                continue
            for plan in plans:
                records.extend(run_pair(task, plan, rbf_config))
    return records


def valid_run_counts(records) -> dict[tuple[str, int, str], int]:
    """Valid-run count per (regime, output_index, method)."""
    counts: dict[tuple[str, int, str], int] = {}
    for regime in REGIMES:
        for output_index in (1, 2, 3):
            for method in METHODS:
                counts[(regime, output_index, method)] = 0
    for rec in records:
        if rec.valid:
            counts[(rec.regime, rec.output_index, rec.method)] += 1
    return counts
