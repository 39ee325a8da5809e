"""Command line interface for the interpolation benchmark.

Subcommands:
  generate   write the factorial dataset as CSV
  run        execute the full experiment and write artifacts to --outdir
  report     aggregate an existing runs.csv into the summary table
  surface    export an interpolated grid for one slice
  diagnose   per-slice geometry reports (fill/separation/mesh ratio)

``--config`` accepts a JSON object file or a settings.csv; ``--seed`` and
``--outdir`` override the config seed and the artifact directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from .config import ExperimentConfig, load_config
from .protocol import execute_experiment
from .report import (
    diagnose_slices,
    export_pred_vs_true,
    export_surface_grid,
    read_runs_csv,
    summarize,
    write_grid_csv,
    write_json,
    write_runs_csv,
    write_scatter_csv,
    write_summary_csv,
)
from .synthdata import generate

DEFAULT_OUTDIR = "artifacts"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="config file (JSON or settings.csv)")
    parser.add_argument("--seed", type=int, help="override the master random seed")
    parser.add_argument("--outdir", default=DEFAULT_OUTDIR, help="artifact directory (default: %(default)s)")


def _resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, random_seed=args.seed)
    return config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfbench",
        description="Paired benchmark of cubic and multiquadric RBF surface interpolation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the factorial dataset as CSV")
    _add_common(p)
    p.add_argument("--out", metavar="PATH", help="output CSV (default: <outdir>/dataset.csv)")

    p = sub.add_parser("run", help="run the full experiment and write artifacts")
    _add_common(p)
    p.add_argument("--scatter", action="store_true",
                   help="also write predicted-vs-true scatter rows for valid runs")

    p = sub.add_parser("report", help="summarize an existing runs.csv")
    _add_common(p)
    p.add_argument("--runs", metavar="PATH", help="runs.csv path (default: <outdir>/runs.csv)")

    p = sub.add_parser("surface", help="export an interpolated grid for one slice")
    _add_common(p)
    p.add_argument("--axis", required=True, choices=("x1", "x2", "x3"))
    p.add_argument("--level", required=True, type=float, help="the fixed level of the sliced axis")
    p.add_argument("--output", required=True, type=int, choices=(1, 2, 3))
    p.add_argument("--method", required=True, choices=("cubic", "rbf"))
    p.add_argument("--regime", default="noise-free", choices=("noise-free", "noisy"))
    p.add_argument("--out", metavar="PATH", help="output CSV (default: <outdir>/surface.csv)")

    p = sub.add_parser("diagnose", help="geometry reports per slice")
    _add_common(p)
    p.add_argument("--axis", choices=("x1", "x2", "x3"), help="restrict to one sliced axis")
    p.add_argument("--level", type=float, help="restrict to one fixed level")
    p.add_argument("--out", metavar="PATH", help="output JSON (default: print to stdout)")
    return parser


def _cmd_generate(args, config: ExperimentConfig) -> int:
    outdir = Path(args.outdir)
    out = Path(args.out) if args.out else outdir / "dataset.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    dataset = generate(noise=config.noise_spec())
    dataset.write_csv(out)
    print(f"wrote {out} ({dataset.n_rows} rows)")
    return 0


def _cmd_run(args, config: ExperimentConfig) -> int:
    started = time.perf_counter()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    dataset = generate(noise=config.noise_spec())
    records = execute_experiment(dataset, config)
    table = summarize(records, config)

    written = []
    dataset.write_csv(outdir / "dataset.csv")
    written.append("dataset.csv")
    write_runs_csv(records, outdir / "runs.csv")
    written.append("runs.csv")
    write_summary_csv(table, outdir / "summary.csv")
    written.append("summary.csv")
    config.write_settings_csv(outdir / "settings.csv")
    written.append("settings.csv")
    if args.scatter:
        write_scatter_csv(export_pred_vs_true(records), outdir / "scatter.csv")
        written.append("scatter.csv")

    meta = {
        "files": written,
        "config_sha256": config.sha256(),
        "runtime_seconds": time.perf_counter() - started,
        "n_records": len(records),
    }
    write_json(meta, outdir / "meta.json")
    print(table.to_text())
    print(f"\nartifacts in {outdir}: {', '.join(written + ['meta.json'])}")
    return 0


def _cmd_report(args, config: ExperimentConfig) -> int:
    runs_path = Path(args.runs) if args.runs else Path(args.outdir) / "runs.csv"
    records = read_runs_csv(runs_path)
    if not records:
        print(f"error: no runs in {runs_path}", file=sys.stderr)
        return 1
    settings = runs_path.parent / "settings.csv"
    if args.config is None and settings.exists():
        config = ExperimentConfig.from_settings_csv(settings)
        if args.seed is not None:
            config = dataclasses.replace(config, random_seed=args.seed)
    table = summarize(records, config)
    print(table.to_text())
    return 0


def _cmd_surface(args, config: ExperimentConfig) -> int:
    dataset = generate(noise=config.noise_spec())
    header, rows = export_surface_grid(
        dataset, args.axis, args.level, args.output, args.method, args.regime, config
    )
    out = Path(args.out) if args.out else Path(args.outdir) / "surface.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_grid_csv(header, rows, out)
    defined = sum(1 for _, _, v in rows if v is not None)
    print(f"wrote {out} ({defined}/{len(rows)} cells defined)")
    return 0


def _cmd_diagnose(args, config: ExperimentConfig) -> int:
    dataset = generate(noise=config.noise_spec())
    reports = diagnose_slices(dataset, args.axis, args.level, grid_resolution=200)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_json(reports, out)
        print(f"wrote {out} ({len(reports)} slices)")
    else:
        print(json.dumps(reports, indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "run": _cmd_run,
    "report": _cmd_report,
    "surface": _cmd_surface,
    "diagnose": _cmd_diagnose,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _resolve_config(args)
        return _COMMANDS[args.command](args, config)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
