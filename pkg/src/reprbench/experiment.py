"""Benchmark protocol: datasets per split, metrics, the seed grid and reports."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .calendar_features import DEFAULT_TZ_OFFSET_HOURS, HolidayCalendar, encode_calendar_many, german_holidays
from .errors import (
    DivisionByZero,
    EmptyInput,
    ExperimentError,
    InsufficientHistory,
    LengthMismatch,
    ReprBenchError,
)
from .ingest import TimeSeries
from .models import (
    Family,
    ModelSpec,
    TrainingConfig,
    build_model,
    default_family,
    fit_linear,
    predict,
    predict_linear,
    save_model,
    train_model,
)
from .samples import Sample, SampleSet
from .transforms import WINDOW, ReprKind, window_matrix

log = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")
HORIZON_NAMES = {1: "one-hour", 24: "one-day", 168: "one-week"}
RUNS_HEADER = ["representation", "horizon_hours", "seed", "test_mae_gw"]
AGGREGATE_HEADER = ["representation", "horizon_hours", "mean_mae_gw", "std_mae_gw", "rel_advantage"]
BASELINE_HEADER = ["baseline", "horizon_hours", "test_mae_gw"]
BASELINES = {"linear_naive": ReprKind.NAIVE, "linear_naive_differences": ReprKind.NAIVE_DIFFERENCES}

__all__ = [
    "Aggregate", "ExperimentConfig", "ExperimentReport", "Sample", "SampleSet",
    "make_dataset", "mae", "parse_report_csv", "relative_advantage", "render_report",
    "run_experiment", "split_by_year",
]


@dataclass
class ExperimentConfig:
    representations: list = field(default_factory=lambda: list(ReprKind))
    horizons: list = field(default_factory=lambda: [1, 24, 168])
    seeds: list = field(default_factory=lambda: list(range(1, 11)))
    train_years: tuple = (2015, 2017)
    val_years: tuple = (2018, 2018)
    test_years: tuple = (2019, 2019)
    tz_offset_hours: int = DEFAULT_TZ_OFFSET_HOURS
    fcn_hidden: tuple = (128, 64, 32)
    cnn_filters: tuple = (16, 32)
    cnn_hidden: tuple = (128, 64, 32)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    baselines: bool = True
    jobs: int = 1

    def __post_init__(self):
        self.representations = [ReprKind(r) for r in self.representations]
        self.horizons = [int(h) for h in self.horizons]
        self.seeds = [int(s) for s in self.seeds]
        if isinstance(self.training, dict):
            self.training = TrainingConfig(**self.training)
        if any(h < 1 for h in self.horizons):
            raise ValueError("horizons must be positive")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        spans = sorted(tuple(map(int, y)) for y in (self.train_years, self.val_years, self.test_years))
        if any(lo > hi for lo, hi in spans) or any(a[1] >= b[0] for a, b in zip(spans, spans[1:])):
            raise ValueError("split year ranges must be valid and disjoint")

    def years(self, split: str) -> tuple:
        return {"train": self.train_years, "val": self.val_years, "test": self.test_years}[split]

    def model_spec(self, kind: ReprKind, horizon: int, family: Family | None = None) -> ModelSpec:
        return ModelSpec(
            family=family or default_family(kind), repr=kind, horizon=horizon,
            fcn_hidden=self.fcn_hidden, cnn_filters=self.cnn_filters,
            cnn_hidden=self.cnn_hidden, training=self.training,
        )


def split_by_year(t, cfg: ExperimentConfig | None = None) -> str | None:
    """Split holding a target at time ``t``, by calendar year."""
    cfg = cfg or ExperimentConfig()
    year = pd.Timestamp(t).year
    for name in SPLITS:
        lo, hi = cfg.years(name)
        if lo <= year <= hi:
            return name
    return None


def make_dataset(
    ts: TimeSeries,
    kind: ReprKind,
    h: int,
    split: str,
    cfg: ExperimentConfig | None = None,
    hol: HolidayCalendar | None = None,
    strict: bool = True,
) -> SampleSet:
    """One sample per hour whose target time (local) falls in ``split``.

    Every representation requires origins ``k >= 167 + h`` so plain and
    differenced datasets cover identical targets. With ``strict=False`` targets
    lacking that history are dropped instead of raising.
    """
    cfg = cfg or ExperimentConfig()
    hol = german_holidays() if hol is None else hol
    kind = ReprKind(kind)
    lo, hi = cfg.years(split)
    local_years = (ts.timestamps + pd.Timedelta(hours=cfg.tz_offset_hours)).year
    targets = np.flatnonzero((local_years >= lo) & (local_years <= hi))
    origins = targets - h
    ok = origins >= WINDOW - 1 + h
    if not ok.all():
        if strict:
            first = ts.timestamps[targets[~ok][0]]
            raise InsufficientHistory(
                f"{split} target {first} needs {WINDOW - 1 + 2 * h} h of history before it"
            )
        targets, origins = targets[ok], origins[ok]
    x = ts.values
    return SampleSet(
        kind=kind,
        horizon=h,
        inputs=window_matrix(x, origins, kind, h),
        calendar=encode_calendar_many(ts.timestamps[targets], hol, cfg.tz_offset_hours),
        target_absolute=x[targets].copy(),
        x_k=x[origins].copy(),
        origin_index=origins,
        origin_timestamps=ts.timestamps[origins],
    )


def mae(y, y_hat) -> float:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise LengthMismatch(f"{y.shape} vs {y_hat.shape}")
    if y.size == 0:
        raise EmptyInput("MAE of no values")
    return float(np.mean(np.abs(y - y_hat)))


def relative_advantage(mae_compare: float, mae_naive: float) -> float:
    """``mae_compare / mae_naive - 1``; negative means better than naive."""
    if not mae_naive > 0:
        raise DivisionByZero(f"reference MAE must be positive, got {mae_naive}")
    return mae_compare / mae_naive - 1.0


@dataclass(frozen=True)
class RunResult:
    representation: str
    horizon: int
    seed: int
    test_mae: float
    val_mae: float = float("nan")
    epochs: int = 0


@dataclass(frozen=True)
class Aggregate:
    representation: str
    horizon: int
    mean: float
    std: float
    rel_advantage: float | None


@dataclass
class ExperimentReport:
    runs: list = field(default_factory=list)
    baselines: dict = field(default_factory=dict)
    _aggregates: list | None = None

    def aggregates(self) -> list[Aggregate]:
        """Mean and population std over seeds per (representation, horizon)."""
        if self._aggregates is not None:
            return list(self._aggregates)
        groups: dict = {}
        for r in self.runs:
            groups.setdefault((r.horizon, r.representation), []).append(r.test_mae)
        means = {key: float(np.mean(v)) for key, v in groups.items()}
        out = []
        for (h, rep), values in sorted(groups.items(), key=lambda kv: (kv[0][0], _repr_order(kv[0][1]))):
            ref = means.get((h, ReprKind.NAIVE.value))
            rel = relative_advantage(means[(h, rep)], ref) if ref else None
            out.append(Aggregate(rep, h, means[(h, rep)], float(np.std(values)), rel))
        return out

    def mean_mae(self, representation, horizon: int) -> float:
        rep = ReprKind(representation).value
        for a in self.aggregates():
            if a.representation == rep and a.horizon == horizon:
                return a.mean
        raise KeyError((rep, horizon))


def _repr_order(name: str) -> int:
    values = [k.value for k in ReprKind]
    return values.index(name) if name in values else len(values)


def _fmt(v) -> str:
    return "" if v is None else f"{v:.6f}"


def render_runs_csv(r: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUNS_HEADER)
    for run in sorted(r.runs, key=lambda x: (x.horizon, _repr_order(x.representation), x.seed)):
        w.writerow([run.representation, run.horizon, run.seed, _fmt(run.test_mae)])
    return buf.getvalue()


def render_baselines_csv(r: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BASELINE_HEADER)
    for (name, h), value in sorted(r.baselines.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        w.writerow([name, h, _fmt(value)])
    return buf.getvalue()


def _horizon_label(h: int) -> str:
    return f"{HORIZON_NAMES[h]} ({h} h)" if h in HORIZON_NAMES else f"{h} h"


def render_report(r: ExperimentReport, format: str = "csv") -> str:
    """Aggregate table as CSV or as a markdown table with one row per horizon."""
    aggs = r.aggregates()
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for a in aggs:
            w.writerow([a.representation, a.horizon, _fmt(a.mean), _fmt(a.std), _fmt(a.rel_advantage)])
        return buf.getvalue()
    if format != "markdown":
        raise ValueError(f"unknown report format {format!r}")

    reps = sorted({a.representation for a in aggs}, key=_repr_order)
    bases = sorted({name for name, _ in r.baselines})
    horizons = sorted({a.horizon for a in aggs} | {h for _, h in r.baselines})
    cols = ["Horizon"] + reps + [f"baseline {b}" for b in bases]
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    cell = {(a.representation, a.horizon): a for a in aggs}
    for h in horizons:
        row = [_horizon_label(h)]
        for rep in reps:
            a = cell.get((rep, h))
            if a is None:
                row.append("")
                continue
            rel = "" if a.rel_advantage is None else f" [{100 * a.rel_advantage:+.1f}%]"
            row.append(f"{a.mean:.3f} (±{a.std:.3f}){rel}")
        for b in bases:
            v = r.baselines.get((b, h))
            row.append("" if v is None else f"{v:.3f}")
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def _opt_float(text: str):
    return None if text == "" else float(text)


def parse_report_csv(text: str, baselines_text: str | None = None) -> ExperimentReport:
    """Inverse of ``render_report(..., "csv")`` (plus an optional baselines CSV)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != AGGREGATE_HEADER:
        raise ValueError(f"aggregate CSV must start with header {','.join(AGGREGATE_HEADER)}")
    aggs = [
        Aggregate(rep, int(h), float(m), float(s), _opt_float(rel))
        for rep, h, m, s, rel in rows[1:]
    ]
    baselines = {}
    if baselines_text:
        brows = list(csv.reader(io.StringIO(baselines_text)))
        if not brows or brows[0] != BASELINE_HEADER:
            raise ValueError(f"baseline CSV must start with header {','.join(BASELINE_HEADER)}")
        baselines = {(name, int(h)): float(v) for name, h, v in brows[1:]}
    return ExperimentReport(runs=[], baselines=baselines, _aggregates=aggs)


# -- grid execution ---------------------------------------------------------

_WORKER: dict = {}


def _init_worker(ts, hol, cfg, models_dir=None):
    _WORKER.clear()
    _WORKER.update(ts=ts, hol=hol, cfg=cfg, cache={}, models_dir=models_dir)


def _datasets(kind: ReprKind, h: int):
    cache = _WORKER["cache"]
    key = (kind, h)
    if key not in cache:
        ts, hol, cfg = _WORKER["ts"], _WORKER["hol"], _WORKER["cfg"]
        cache.clear()
        cache[key] = {
            split: make_dataset(ts, kind, h, split, cfg, hol, strict=split != "train")
            for split in SPLITS
        }
    return cache[key]


def _run_cell(cell) -> RunResult:
    kind, h, seed = cell
    cfg = _WORKER["cfg"]
    stage = "experiment.make_dataset"
    try:
        data = _datasets(kind, h)
        stage = "models.train_model"
        model = train_model(build_model(cfg.model_spec(kind, h), seed), data["train"], data["val"], seed)
        stage = "models.predict"
        test = data["test"]
        score = mae(test.target_absolute, predict(model, test))
        if _WORKER["models_dir"] is not None:
            stage = "models.save_model"
            save_model(model, Path(_WORKER["models_dir"]) / f"{kind.value}_h{h}_seed{seed}.model")
    except (ReprBenchError, OSError) as exc:
        raise ExperimentError(stage, kind.value, h, seed, exc) from exc
    log.info("%s h=%d seed=%d: test MAE %.4f GW (%d epochs)",
             kind.value, h, seed, score, len(model.val_history))
    return RunResult(kind.value, h, seed, score, model.best_val_mae, len(model.val_history))


def _run_baselines(h: int) -> dict:
    ts, hol, cfg = _WORKER["ts"], _WORKER["hol"], _WORKER["cfg"]
    out = {}
    for name, kind in BASELINES.items():
        stage = "experiment.make_dataset"
        try:
            fit_set = SampleSet.concat([
                make_dataset(ts, kind, h, "train", cfg, hol, strict=False),
                make_dataset(ts, kind, h, "val", cfg, hol),
            ])
            test = make_dataset(ts, kind, h, "test", cfg, hol)
            stage = "models.fit_linear"
            model = fit_linear(fit_set, kind.differenced)
            out[(name, h)] = mae(test.target_absolute, predict_linear(model, test))
        except ReprBenchError as exc:
            raise ExperimentError(stage, name, h, None, exc) from exc
        log.info("%s h=%d: test MAE %.4f GW", name, h, out[(name, h)])
    return out


def run_experiment(
    cfg: ExperimentConfig,
    ts: TimeSeries,
    hol: HolidayCalendar | None = None,
    models_dir=None,
) -> ExperimentReport:
    """Train one network per (representation, horizon, seed), score it on the
    test split, and fit the two linear baselines once per horizon on train+val.

    If ``models_dir`` is given every trained network is checkpointed there.
    """
    hol = german_holidays() if hol is None else hol
    if models_dir is not None:
        Path(models_dir).mkdir(parents=True, exist_ok=True)
    cells = [(k, h, s) for h in cfg.horizons for k in cfg.representations for s in cfg.seeds]
    report = ExperimentReport()

    if cfg.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(cfg.jobs, initializer=_init_worker, initargs=(ts, hol, cfg, models_dir)) as pool:
            report.runs = list(pool.map(_run_cell, cells))
            if cfg.baselines:
                for part in pool.map(_run_baselines, cfg.horizons):
                    report.baselines.update(part)
    else:
        _init_worker(ts, hol, cfg, models_dir)
        try:
            report.runs = [_run_cell(c) for c in cells]
            if cfg.baselines:
                for h in cfg.horizons:
                    report.baselines.update(_run_baselines(h))
        finally:
            _WORKER.clear()
    return report
