"""Aggregation and artifact export: summary tables, CSV/JSON files, grids.

Everything written here is plot-ready data rather than rendered figures:
surface grids with explicit ``NA`` markers for undefined cells, predicted
versus true scatter rows, per-slice geometry reports, and the aggregated
summary table with bootstrap confidence intervals.

File formats are pinned:
  runs.csv     regime,output,fixed_axis,fixed_level,repeat,method,valid,
               reason,n_test,n_finite,rmse,mae,r2
  summary.csv  regime,output,method,runs,rmse_mean,rmse_ci_lo,rmse_ci_hi,
               mae_mean,r2_mean,r2_ci_lo,r2_ci_hi
  settings.csv key,value rows that round-trip into an ExperimentConfig
  meta.json    every written file, the config hash, and the total runtime
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .cubic import fit_cubic
from .errors import InterpolationError
from .geometry import geometry_report
from .metrics import BootstrapCI, bootstrap_ci
from .protocol import METHODS, REGIMES, enumerate_slices
from .rbf import eval_rbf, fit_rbf
from .synthdata import FactorialDataset

__all__ = [
    "SummaryRow",
    "SummaryTable",
    "summarize",
    "write_runs_csv",
    "read_runs_csv",
    "write_summary_csv",
    "export_surface_grid",
    "export_pred_vs_true",
    "diagnose_slices",
    "RUNS_CSV_HEADER",
    "SUMMARY_CSV_HEADER",
    "NA_TOKEN",
]

log = logging.getLogger(__name__)

RUNS_CSV_HEADER = (
    "regime,output,fixed_axis,fixed_level,repeat,method,valid,reason,"
    "n_test,n_finite,rmse,mae,r2"
)
SUMMARY_CSV_HEADER = (
    "regime,output,method,runs,rmse_mean,rmse_ci_lo,rmse_ci_hi,"
    "mae_mean,r2_mean,r2_ci_lo,r2_ci_hi"
)
SCATTER_CSV_HEADER = "regime,output,fixed_axis,fixed_level,repeat,method,y_true,y_pred"
NA_TOKEN = "NA"

# Domain tag separating bootstrap seeding from noise (1) and splits (2).
_BOOTSTRAP_STREAM_TAG = 3


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return NA_TOKEN
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


@dataclass(frozen=True)
class SummaryRow:
    regime: str
    output_index: int
    method: str
    valid_runs: int
    rmse_mean: float | None
    mae_mean: float | None
    r2_mean: float | None
    rmse_ci: BootstrapCI | None
    r2_ci: BootstrapCI | None


@dataclass(frozen=True)
class SummaryTable:
    rows: tuple[SummaryRow, ...]

    def row(self, regime: str, output_index: int, method: str) -> SummaryRow:
        for r in self.rows:
            if (r.regime, r.output_index, r.method) == (regime, output_index, method):
                return r
        raise KeyError((regime, output_index, method))

    def to_text(self) -> str:
        lines = ["regime      output  method  runs  rmse_mean  r2_mean"]
        for r in self.rows:
            rmse = "NA" if r.rmse_mean is None else f"{r.rmse_mean:.3f}"
            r2 = "NA" if r.r2_mean is None else f"{r.r2_mean:.3f}"
            lines.append(
                f"{r.regime:11s} {r.output_index:6d}  {r.method:6s} {r.valid_runs:5d}  {rmse:>9s}  {r2:>7s}"
            )
        return "\n".join(lines)


def summarize(records, config: ExperimentConfig | None = None) -> SummaryTable:
    """Aggregate run records into one row per (regime, output, method).

    Means are taken over valid runs; bootstrap percentile intervals cover the
    mean of the run-level RMSE and R^2 values. Rows with zero valid runs are
    emitted with undefined metrics.
    """
    config = config if config is not None else ExperimentConfig()
    records = list(records)
    if not records:
        raise ValueError("no run records to summarize")
    rows = []
    for regime in REGIMES:
        for output_index in (1, 2, 3):
            for method in METHODS:
                sel = [
                    r for r in records
                    if r.valid
                    and (r.regime, r.output_index, r.method) == (regime, output_index, method)
                ]
                if not sel:
                    rows.append(SummaryRow(regime, output_index, method, 0,
                                           None, None, None, None, None))
                    continue
                rmse = np.array([r.metrics.rmse for r in sel])
                mae = np.array([r.metrics.mae for r in sel])
                r2 = np.array([r.metrics.r2 for r in sel])
                seed_base = (
                    config.random_seed,
                    _BOOTSTRAP_STREAM_TAG,
                    REGIMES.index(regime),
                    output_index,
                    METHODS.index(method),
                )
                rows.append(SummaryRow(
                    regime=regime,
                    output_index=output_index,
                    method=method,
                    valid_runs=len(sel),
                    rmse_mean=float(rmse.mean()),
                    mae_mean=float(mae.mean()),
                    r2_mean=float(r2.mean()),
                    rmse_ci=bootstrap_ci(rmse, config.bootstrap_resamples, seed=seed_base + (0,)),
                    r2_ci=bootstrap_ci(r2, config.bootstrap_resamples, seed=seed_base + (1,)),
                ))
    return SummaryTable(rows=tuple(rows))


def write_runs_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(RUNS_CSV_HEADER + "\n")
        for r in records:
            m = r.metrics
            fields = [
                r.regime, str(r.output_index), r.fixed_axis, _fmt(r.fixed_level),
                str(r.repeat), r.method, "true" if r.valid else "false", r.reason,
                str(r.n_test), str(r.n_finite),
                _fmt(m.rmse if m else None), _fmt(m.mae if m else None), _fmt(m.r2 if m else None),
            ]
            fh.write(",".join(fields) + "\n")


@dataclass(frozen=True)
class _CsvRunRecord:
    """Summary-grade view of a runs.csv row (no predictions)."""

    regime: str
    output_index: int
    fixed_axis: str
    fixed_level: float
    repeat: int
    method: str
    valid: bool
    reason: str
    n_test: int
    n_finite: int
    metrics: object


@dataclass(frozen=True)
class _CsvMetrics:
    rmse: float
    mae: float
    r2: float


def read_runs_csv(path) -> list[_CsvRunRecord]:
    """Parse a runs.csv back into summary-grade records."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RUNS_CSV_HEADER.split(","):
            raise ValueError(f"{path}: unexpected runs.csv header {header}")
        for row in reader:
            valid = row[6] == "true"
            metrics = None
            if valid:
                metrics = _CsvMetrics(rmse=float(row[10]), mae=float(row[11]), r2=float(row[12]))
            records.append(_CsvRunRecord(
                regime=row[0], output_index=int(row[1]), fixed_axis=row[2],
                fixed_level=float(row[3]), repeat=int(row[4]), method=row[5],
                valid=valid, reason=row[7], n_test=int(row[8]), n_finite=int(row[9]),
                metrics=metrics,
            ))
    return records


def write_summary_csv(table: SummaryTable, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SUMMARY_CSV_HEADER + "\n")
        for r in table.rows:
            fields = [
                r.regime, str(r.output_index), r.method, str(r.valid_runs),
                _fmt(r.rmse_mean),
                _fmt(r.rmse_ci.lower if r.rmse_ci else None),
                _fmt(r.rmse_ci.upper if r.rmse_ci else None),
                _fmt(r.mae_mean),
                _fmt(r.r2_mean),
                _fmt(r.r2_ci.lower if r.r2_ci else None),
                _fmt(r.r2_ci.upper if r.r2_ci else None),
            ]
            fh.write(",".join(fields) + "\n")


def _find_slice(dataset: FactorialDataset, regime: str, fixed_axis: str,
                fixed_level: float, output_index: int):
    for task in enumerate_slices(dataset, regime):
        if (
            task.fixed_axis == fixed_axis
            and task.output_index == output_index
            and np.isclose(task.fixed_level, fixed_level, rtol=1e-12, atol=1e-12)
        ):
            return task
    raise ValueError(
        f"no slice with {fixed_axis}={fixed_level:g} and output {output_index}"
    )


def export_surface_grid(
    dataset: FactorialDataset,
    fixed_axis: str,
    fixed_level: float,
    output_index: int,
    method: str,
    regime: str,
    config: ExperimentConfig | None = None,
) -> tuple[str, list[tuple[float, float, float | None]]]:
    """Interpolated values on a uniform grid over a slice's free-axis box.

    The surface is fitted on the whole slice. Returns (csv_header, rows) with
    one row per grid cell; cells outside the cubic surface's support hold
    None (written as ``NA``). Fit failures raise the underlying
    InterpolationError.
    """
    config = config if config is not None else ExperimentConfig()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    task = _find_slice(dataset, regime, fixed_axis, fixed_level, output_index)
    if method == "cubic":
        surface = fit_cubic(task.points, task.values)
        predict = surface.evaluate
    else:
        surface = fit_rbf(task.points, task.values, config.rbf_config())
        predict = lambda q: eval_rbf(surface, q)  # noqa: E731
    res = config.grid_resolution
    lo = task.points.min(axis=0)
    hi = task.points.max(axis=0)
    gu, gv = np.meshgrid(
        np.linspace(lo[0], hi[0], res), np.linspace(lo[1], hi[1], res), indexing="ij"
    )
    queries = np.column_stack([gu.ravel(), gv.ravel()])
    values = predict(queries)
    header = f"{task.free_axes[0]},{task.free_axes[1]},value"
    rows = [
        (float(q[0]), float(q[1]), float(v) if math.isfinite(v) else None)
        for q, v in zip(queries, values)
    ]
    return header, rows


def write_grid_csv(header: str, rows, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for u, v, value in rows:
            fh.write(f"{_fmt(u)},{_fmt(v)},{_fmt(value)}\n")


def export_pred_vs_true(records, **filters) -> list[tuple]:
    """Scatter rows (regime, output, axis, level, repeat, method, y_true, y_pred).

    Keyword filters narrow the selection (regime=..., output_index=...,
    method=..., fixed_axis=..., fixed_level=..., repeat=...). Invalid records
    are excluded and logged. Returns rows for valid records only.
    """
    allowed = {"regime", "output_index", "method", "fixed_axis", "fixed_level", "repeat"}
    unknown = set(filters) - allowed
    if unknown:
        raise ValueError(f"unknown filters: {sorted(unknown)}")
    rows = []
    skipped = 0
    for r in records:
        if any(getattr(r, key) != val for key, val in filters.items()):
            continue
        if not r.valid:
            skipped += 1
            continue
        for yt, yp in zip(r.y_true, r.y_pred):
            rows.append((
                r.regime, r.output_index, r.fixed_axis, r.fixed_level,
                r.repeat, r.method, float(yt), float(yp),
            ))
    if skipped:
        log.info("export_pred_vs_true: skipped %d invalid records", skipped)
    return rows


def write_scatter_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SCATTER_CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def diagnose_slices(dataset: FactorialDataset, fixed_axis: str | None = None,
                    fixed_level: float | None = None, grid_resolution: int = 200) -> list[dict]:
    """Geometry report per slice: fill distance, separation, mesh ratio.

    Slice geometry does not depend on output or regime, so reports are
    emitted once per (axis, level).
    """
    reports = []
    seen = set()
    for task in enumerate_slices(dataset, "noise-free"):
        key = (task.fixed_axis, task.level_index)
        if key in seen:
            continue
        seen.add(key)
        if fixed_axis is not None and task.fixed_axis != fixed_axis:
            continue
        if fixed_level is not None and not np.isclose(task.fixed_level, fixed_level, rtol=1e-12, atol=1e-12):
            continue
        entry = {"fixed_axis": task.fixed_axis, "fixed_level": task.fixed_level}
        entry.update(geometry_report(task.points, grid_resolution=grid_resolution).to_dict())
        reports.append(entry)
    if not reports:
        raise ValueError(f"no slice matches {fixed_axis}={fixed_level}")
    return reports


def write_json(payload, path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
