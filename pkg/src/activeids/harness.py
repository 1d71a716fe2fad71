"""Experiment orchestration and report persistence.

Experiment 1 evaluates the three sampling strategies over repeated runs
and emits the metric summary plus the per-run distribution. Experiment 2
runs the bagging strategy sequentially, accumulating per-host detection
counts into attack probabilities after every run.

Every run's sub-seed derives from (master seed, experiment, strategy, run
index), so any single run can be reproduced from the manifest alone.
"""

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .active_learning import (
    KMeansBaggingSampling,
    KMeansSampling,
    RandomSampling,
    RunResult,
    SamplingStrategy,
    SimulatedOracle,
    run_iteration,
)
from .dataset import RecordSet, Schema, SynthConfig, encode, load, load_schema, synth_generate
from .evaluation import MetricsSummary, run_metrics, summarize
from .forest import ForestParams
from .seeds import derive_seed
from .situation import DetectionParams, HostState, aggregate_run, host_table_rows, \
    host_table_to_csv, update


DEFAULT_STRATEGIES: tuple[SamplingStrategy, ...] = (
    RandomSampling(),
    KMeansSampling(),
    KMeansBaggingSampling(),
)


@dataclass(frozen=True)
class DatasetSource:
    """Either a CSV+schema pair on disk or a synthetic generator config."""

    path: str | None = None
    schema_path: str | None = None
    synth: SynthConfig | None = None
    synth_seed: int = 0

    def describe(self) -> dict:
        if self.synth is not None:
            return {"synth": vars(self.synth) | {"seed": self.synth_seed}}
        return {"path": str(self.path), "schema_path": str(self.schema_path)}

    def materialize(self) -> RecordSet:
        if self.synth is not None:
            return synth_generate(self.synth, self.synth_seed)
        if self.path is None:
            raise ValueError("dataset source needs a path or a synth config")
        schema = load_schema(self.schema_path)
        return load(self.path, schema)


@dataclass(frozen=True)
class ExperimentConfig:
    source: DatasetSource
    strategies: tuple[SamplingStrategy, ...] = DEFAULT_STRATEGIES
    runs_per_strategy: int = 30
    n_runs: int = 10
    min_attack_labels: int = 1
    retry_cap: int = 100
    detection: DetectionParams = DetectionParams()
    forest_params: ForestParams = ForestParams()
    master_seed: int = 0
    out_dir: str = "out"


@dataclass
class ExperimentReport:
    manifest: dict
    runs: list[RunResult]
    summaries: dict[str, MetricsSummary] = field(default_factory=dict)
    host_snapshots: list[dict[str, HostState]] = field(default_factory=list)
    host_rows: list[dict] = field(default_factory=list)
    paths: dict[str, Path] = field(default_factory=dict)


RUN_FIELDS = [
    "strategy", "run", "seed", "attempts", "degraded", "sample_size",
    "labels_requested", "k", "n_features", "tp", "tn", "fp", "fn",
    "accuracy", "sensitivity", "fpr",
]


def _run_row(result: RunResult, run_index: int) -> dict:
    cm = result.metrics
    metrics = run_metrics(cm)
    return {
        "strategy": result.strategy,
        "run": run_index,
        "seed": result.seed,
        "attempts": result.attempts,
        "degraded": int(result.degraded),
        "sample_size": len(result.sample_indices),
        "labels_requested": result.labels_requested,
        "k": result.sample_info.get("k", ""),
        "n_features": result.sample_info.get("n_features", ""),
        "tp": cm.tp,
        "tn": cm.tn,
        "fp": cm.fp,
        "fn": cm.fn,
        "accuracy": repr(metrics["accuracy"]),
        "sensitivity": repr(metrics["sensitivity"]),
        "fpr": repr(metrics["fpr"]),
    }


def _write_rows(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def _manifest(cfg: ExperimentConfig, experiment: str, run_seeds: dict) -> dict:
    return {
        "experiment": experiment,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "dataset": cfg.source.describe(),
        "config": {
            "strategies": [s.name for s in cfg.strategies],
            "runs_per_strategy": cfg.runs_per_strategy,
            "n_runs": cfg.n_runs,
            "min_attack_labels": cfg.min_attack_labels,
            "retry_cap": cfg.retry_cap,
            "p": cfg.detection.p,
            "mode": cfg.detection.mode,
            "n_trees": cfg.forest_params.n_trees,
        },
        "master_seed": cfg.master_seed,
        "run_seeds": run_seeds,
    }


def _write_manifest(manifest: dict, out: Path) -> Path:
    path = out / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def experiment1(cfg: ExperimentConfig) -> ExperimentReport:
    """Sampling-method evaluation: every strategy, runs_per_strategy runs."""
    rs = cfg.source.materialize()
    m = encode(rs)
    oracle = SimulatedOracle(rs.labels)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    results: list[RunResult] = []
    rows: list[dict] = []
    run_seeds: dict[str, list[int]] = {}
    summaries: dict[str, MetricsSummary] = {}
    for strategy in cfg.strategies:
        per_strategy: list[RunResult] = []
        seeds = []
        for i in range(cfg.runs_per_strategy):
            seed = derive_seed(cfg.master_seed, "exp1", strategy.name, i)
            seeds.append(seed)
            result = run_iteration(
                rs, m, strategy, oracle,
                min_attack_labels=cfg.min_attack_labels,
                retry_cap=cfg.retry_cap,
                seed=seed,
                forest_params=cfg.forest_params,
            )
            per_strategy.append(result)
            rows.append(_run_row(result, i))
        run_seeds[strategy.name] = seeds
        summaries[strategy.name] = summarize(
            [run_metrics(r.metrics) for r in per_strategy]
        )
        results.extend(per_strategy)

    manifest = _manifest(cfg, "experiment1", run_seeds)
    report = ExperimentReport(manifest=manifest, runs=results, summaries=summaries)

    runs_path = out / "exp1_runs.csv"
    _write_rows(runs_path, RUN_FIELDS, rows)
    summary_path = out / "exp1_summary.csv"
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["strategy", "metric", "mean", "min", "q1", "median", "q3", "max"])
        for strategy in cfg.strategies:
            summary = summaries[strategy.name]
            for metric in ("accuracy", "sensitivity", "fpr"):
                agg = summary.aggregates[metric]
                writer.writerow([strategy.name, metric, repr(agg.mean), repr(agg.min),
                                 repr(agg.q1), repr(agg.median), repr(agg.q3), repr(agg.max)])
    report.paths = {
        "manifest": _write_manifest(manifest, out),
        "runs": runs_path,
        "summary": summary_path,
    }
    return report


def experiment2(cfg: ExperimentConfig, oracle=None,
                strategy: SamplingStrategy = KMeansBaggingSampling(),
                on_run=None) -> ExperimentReport:
    """Cumulative per-host probabilities over n_runs sequential runs.

    p stays fixed at the configured value for every run (the detection
    rate is carried in from a prior sampling-method evaluation, not
    re-estimated mid-experiment). on_run, when given, is called with
    (run ordinal, host table snapshot) after every run so a live view can
    track progress.
    """
    rs = cfg.source.materialize()
    m = encode(rs)
    if oracle is None:
        oracle = SimulatedOracle(rs.labels)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    results: list[RunResult] = []
    rows: list[dict] = []
    count_rows: list[dict] = []
    snapshots: list[dict[str, HostState]] = []
    hosts: dict[str, HostState] = {}
    seeds = []
    for i in range(cfg.n_runs):
        seed = derive_seed(cfg.master_seed, "exp2", strategy.name, i)
        seeds.append(seed)
        result = run_iteration(
            rs, m, strategy, oracle,
            min_attack_labels=cfg.min_attack_labels,
            retry_cap=cfg.retry_cap,
            seed=seed,
            forest_params=cfg.forest_params,
        )
        results.append(result)
        rows.append(_run_row(result, i))
        counts = aggregate_run(result.predictions, rs.srcips)
        for srcip in sorted(counts):
            n_i, d_i = counts[srcip]
            count_rows.append({"srcip": srcip, "run": i + 1, "n_i": n_i, "d_i": d_i})
        hosts = update(hosts, counts, cfg.detection)
        snapshots.append(hosts)
        if on_run is not None:
            on_run(i + 1, hosts)

    host_rows = host_table_rows(snapshots, rs.host_types())
    manifest = _manifest(cfg, "experiment2", {strategy.name: seeds})
    report = ExperimentReport(
        manifest=manifest,
        runs=results,
        host_snapshots=snapshots,
        host_rows=host_rows,
    )

    runs_path = out / "exp2_runs.csv"
    _write_rows(runs_path, RUN_FIELDS, rows)
    counts_path = out / "exp2_counts.csv"
    _write_rows(counts_path, ["srcip", "run", "n_i", "d_i"], count_rows)
    hosts_path = out / "exp2_hosts.csv"
    host_table_to_csv(host_rows, hosts_path, cfg.n_runs)
    report.paths = {
        "manifest": _write_manifest(manifest, out),
        "runs": runs_path,
        "counts": counts_path,
        "hosts": hosts_path,
    }
    return report


def recompute_host_rows(counts_path, detection: DetectionParams,
                        types: dict[str, str] | None = None) -> list[dict]:
    """Rebuild the per-host probability table from the persisted per-run
    counts; the report's own table must match this exactly."""
    per_run: dict[int, dict[str, tuple[int, int]]] = {}
    with open(counts_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            run = int(row["run"])
            per_run.setdefault(run, {})[row["srcip"]] = (int(row["n_i"]), int(row["d_i"]))
    hosts: dict[str, HostState] = {}
    snapshots = []
    for run in sorted(per_run):
        hosts = update(hosts, per_run[run], detection)
        snapshots.append(hosts)
    return host_table_rows(snapshots, types)
