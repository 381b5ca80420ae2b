"""Command-line entry point: ``reprbench run | inspect | report``.

Settings come from built-in defaults, then an optional JSON ``--config`` file
whose keys are the long flag names with underscores (``"horizons": [1, 24]``),
then explicit flags. Exit codes: 0 success, 1 runtime or data error, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .calendar_features import DEFAULT_TZ_OFFSET_HOURS, german_holidays, load_holidays
from .errors import ReprBenchError
from .experiment import (
    ExperimentConfig,
    parse_report_csv,
    render_baselines_csv,
    render_report,
    render_runs_csv,
    run_experiment,
)
from .ingest import DEFAULT_COLUMN, IngestConfig, load_series
from .models import TrainingConfig
from .transforms import ReprKind, build_representation

log = logging.getLogger("reprbench")

DEFAULTS = {
    "data": None,
    "column": DEFAULT_COLUMN,
    "holidays": None,
    "out": "results",
    "repr": [k.value for k in ReprKind],
    "horizons": [1, 24, 168],
    "seeds": list(range(1, 11)),
    "jobs": 1,
    "tz_offset_hours": DEFAULT_TZ_OFFSET_HOURS,
    "start": "2014-01-01T00:00:00Z",
    "end": "2019-12-31T23:00:00Z",
    "max_gap_hours": 3,
    "train_years": [2015, 2017],
    "val_years": [2018, 2018],
    "test_years": [2019, 2019],
    "fcn_hidden": [128, 64, 32],
    "cnn_filters": [16, 32],
    "cnn_hidden": [128, 64, 32],
    "lr": 1e-3,
    "epochs": 200,
    "batch_size": 64,
    "patience": 10,
    "baselines": True,
    "save_models": False,
}


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    """``"1,24,168"`` or ranges such as ``"1-10"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(part)])
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _year_span(text: str) -> list[int]:
    years = _int_list(text)
    return [min(years), max(years)]


def _repr_list(text: str) -> list[str]:
    try:
        return [ReprKind.parse(t).value for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_data_flags(p):
    p.add_argument("--data", help="OPSD-style CSV with a utc_timestamp column")
    p.add_argument("--column", help=f"demand column (default {DEFAULT_COLUMN})")
    p.add_argument("--holidays", help="holiday file, one YYYY-MM-DD per line (default: bundled German list)")
    p.add_argument("--tz-offset-hours", type=int, help="fixed UTC offset of local time (default 1)")
    p.add_argument("--start", help="first UTC timestamp to load")
    p.add_argument("--end", help="last UTC timestamp to load")
    p.add_argument("--max-gap-hours", type=int, help="longest gap filled by interpolation (default 3)")
    p.add_argument("--config", help="JSON file with default values for any flag")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reprbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train and evaluate the representation grid")
    _add_data_flags(run)
    run.add_argument("--out", help="output directory (default ./results)")
    run.add_argument("--repr", type=_repr_list, help="comma-separated representations (default all four)")
    run.add_argument("--horizons", type=_int_list, help="forecast horizons in hours (default 1,24,168)")
    run.add_argument("--seeds", type=_int_list, help="seeds, e.g. 1-10 (default)")
    run.add_argument("--jobs", type=int, help="parallel worker processes (default 1)")
    run.add_argument("--train-years", type=_year_span)
    run.add_argument("--val-years", type=_year_span)
    run.add_argument("--test-years", type=_year_span)
    run.add_argument("--fcn-hidden", type=_int_list, help="FCN widths: hidden,latent,head (default 128,64,32)")
    run.add_argument("--cnn-filters", type=_int_list, help="filters of the two conv layers (default 16,32)")
    run.add_argument("--cnn-hidden", type=_int_list, help="CNN dense widths (default 128,64,32)")
    run.add_argument("--lr", type=float)
    run.add_argument("--epochs", type=int, help="maximum epochs (default 200)")
    run.add_argument("--batch-size", type=int)
    run.add_argument("--patience", type=int, help="early-stopping patience in epochs (default 10)")
    run.add_argument("--no-baselines", dest="baselines", action="store_const", const=False)
    run.add_argument("--save-models", action="store_const", const=True,
                     help="write a checkpoint per trained network to OUT/models/")

    ins = sub.add_parser("inspect", help="print one representation as CSV")
    _add_data_flags(ins)
    ins.add_argument("--origin", required=True, help="forecast origin, UTC (e.g. 2019-03-18T00:00)")
    ins.add_argument("--repr", type=lambda t: _repr_list(t)[0], help="representation (default naive)")
    ins.add_argument("--horizon", type=int, help="differencing lag in hours (default 1)")

    rep = sub.add_parser("report", help="re-render result CSVs")
    rep.add_argument("--in", dest="indir", required=True, help="directory holding aggregate.csv")
    rep.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    return parser


def _settings(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if value is not None and key in DEFAULTS:
            cfg[key] = value
    return cfg


def _load(cfg: dict):
    if not cfg["data"]:
        raise UsageError("--data is required")
    path = Path(cfg["data"])
    if not path.is_file():
        raise FileNotFoundError(f"data file not found: {path}")
    ingest = IngestConfig(
        column_name=cfg["column"], start=pd.Timestamp(cfg["start"]),
        end=pd.Timestamp(cfg["end"]), max_gap_fill_hours=cfg["max_gap_hours"],
    )
    ts = load_series(path, ingest)
    hol = load_holidays(cfg["holidays"]) if cfg["holidays"] else german_holidays()
    log.info("loaded %d hours from %s (%s .. %s)", len(ts), path, ts.timestamps[0], ts.timestamps[-1])
    return ts, hol


def cmd_run(cfg: dict) -> int:
    ts, hol = _load(cfg)
    exp = ExperimentConfig(
        representations=cfg["repr"], horizons=cfg["horizons"], seeds=cfg["seeds"],
        train_years=tuple(cfg["train_years"]), val_years=tuple(cfg["val_years"]),
        test_years=tuple(cfg["test_years"]), tz_offset_hours=cfg["tz_offset_hours"],
        fcn_hidden=tuple(cfg["fcn_hidden"]), cnn_filters=tuple(cfg["cnn_filters"]),
        cnn_hidden=tuple(cfg["cnn_hidden"]),
        training=TrainingConfig(cfg["lr"], cfg["batch_size"], cfg["epochs"], cfg["patience"]),
        baselines=cfg["baselines"], jobs=cfg["jobs"],
    )
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    models_dir = out / "models" if cfg["save_models"] else None
    report = run_experiment(exp, ts, hol, models_dir=models_dir)
    (out / "runs.csv").write_text(render_runs_csv(report), encoding="utf-8")
    (out / "aggregate.csv").write_text(render_report(report, "csv"), encoding="utf-8")
    (out / "baselines.csv").write_text(render_baselines_csv(report), encoding="utf-8")
    markdown = render_report(report, "markdown")
    (out / "report.md").write_text(markdown, encoding="utf-8")
    print(markdown, end="")
    return 0


def cmd_inspect(cfg: dict, origin: str, kind: ReprKind, h: int) -> int:
    ts, _ = _load(cfg)
    try:
        k = ts.index_of(origin)
    except KeyError:
        raise ReprBenchError(f"origin {origin} is outside the loaded series") from None
    data = build_representation(ts, k, kind, h).data
    for row in np.atleast_2d(data):
        print(",".join(repr(float(v)) for v in row))
    return 0


def cmd_report(indir: str, fmt: str) -> int:
    indir = Path(indir)
    agg = (indir / "aggregate.csv").read_text(encoding="utf-8")
    base_path = indir / "baselines.csv"
    base = base_path.read_text(encoding="utf-8") if base_path.exists() else None
    print(render_report(parse_report_csv(agg, base), fmt), end="")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "report":
            return cmd_report(args.indir, args.format)
        cfg = _settings(args)
        if args.command == "run":
            return cmd_run(cfg)
        kind = ReprKind(args.repr or ReprKind.NAIVE)
        return cmd_inspect(cfg, args.origin, kind, args.horizon or 1)
    except UsageError as exc:
        parser.error(str(exc))
    except (ReprBenchError, OSError, ValueError) as exc:
        print(f"reprbench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
