"""Command-line entrypoint.

Subcommands:
    synth   write a synthetic dataset (CSV + sidecar schema)
    exp1    sampling-method evaluation with a simulated oracle
    exp2    cumulative per-host probabilities with a simulated oracle
    label   exp2-style runs with a terminal prompt as the oracle
    serve   start the HTTP labeling service

Defaults mirror the reproduction configuration (30 exp1 runs, 10 exp2
runs, min_attack_labels=1, p=0.325); a bare invocation is the
reproduction run. ACTIVEIDS_OUT_DIR overrides the default output
directory.
"""

import argparse
import os
import secrets
import sys
from pathlib import Path

from .active_learning import (
    KMeansBaggingSampling,
    STRATEGIES,
    TerminalOracle,
)
from .dataset import (
    DatasetError,
    SynthConfig,
    save_csv,
    save_schema,
    synth_generate,
    synth_schema,
)
from .forest import ForestParams
from .harness import (
    DEFAULT_STRATEGIES,
    DatasetSource,
    ExperimentConfig,
    experiment1,
    experiment2,
)
from .situation import DetectionParams


def _default_out() -> str:
    return os.environ.get("ACTIVEIDS_OUT_DIR", "out")


def _add_synth_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hosts", type=int, default=40)
    parser.add_argument("--attack-hosts", type=int, default=4)
    parser.add_argument("--records-per-host", type=int, default=100)
    parser.add_argument("--features", type=int, default=40)
    parser.add_argument("--attack-rate", type=float, default=0.9)
    parser.add_argument("--separation", type=float, default=1.5)


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", help="headerless CSV dataset path")
    parser.add_argument("--schema", help="sidecar schema path (name,kind lines)")
    parser.add_argument("--synth", action="store_true",
                        help="use a synthetic dataset instead of --dataset")
    _add_synth_flags(parser)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed; generated and recorded when omitted")
    parser.add_argument("--out", default=_default_out(), help="output directory")
    parser.add_argument("--min-attack-labels", type=int, default=1)
    parser.add_argument("--retry-cap", type=int, default=100)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--p", type=float, default=0.325,
                        help="per-event detection probability for host aggregation")
    parser.add_argument("--mode", choices=("cdf", "pmf"), default="cdf")


def _synth_cfg(args) -> SynthConfig:
    return SynthConfig(
        n_hosts=args.hosts,
        n_attack_hosts=args.attack_hosts,
        records_per_host=args.records_per_host,
        n_features=args.features,
        attack_rate=args.attack_rate,
        separation=args.separation,
    )


def _source(args, seed: int) -> DatasetSource:
    if args.synth:
        return DatasetSource(synth=_synth_cfg(args), synth_seed=seed)
    if not args.dataset:
        raise DatasetError("a dataset is required: pass --dataset or --synth")
    if not Path(args.dataset).exists():
        raise DatasetError(f"dataset not found: {args.dataset}")
    schema = args.schema
    if not schema:
        raise DatasetError("--schema is required with --dataset")
    if not Path(schema).exists():
        raise DatasetError(f"schema not found: {schema}")
    return DatasetSource(path=args.dataset, schema_path=schema)


def _config(args, seed: int, strategies=DEFAULT_STRATEGIES) -> ExperimentConfig:
    return ExperimentConfig(
        source=_source(args, seed),
        strategies=strategies,
        runs_per_strategy=getattr(args, "runs", 30),
        n_runs=getattr(args, "runs", 10),
        min_attack_labels=args.min_attack_labels,
        retry_cap=args.retry_cap,
        detection=DetectionParams(p=args.p, mode=args.mode),
        forest_params=ForestParams(n_trees=args.trees),
        master_seed=seed,
        out_dir=args.out,
    )


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return secrets.randbits(32)


def cmd_synth(args) -> int:
    seed = _resolve_seed(args)
    cfg = _synth_cfg(args)
    rs = synth_generate(cfg, seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "synth.csv"
    schema_path = out / "synth.schema.csv"
    save_csv(rs, csv_path)
    save_schema(synth_schema(cfg.n_features), schema_path)
    print(f"wrote {csv_path} ({len(rs)} records, seed {seed}) and {schema_path}")
    return 0


def cmd_exp1(args) -> int:
    seed = _resolve_seed(args)
    report = experiment1(_config(args, seed))
    for name, path in sorted(report.paths.items()):
        print(f"{name}: {path}")
    return 0


def cmd_exp2(args) -> int:
    seed = _resolve_seed(args)
    report = experiment2(_config(args, seed))
    for name, path in sorted(report.paths.items()):
        print(f"{name}: {path}")
    return 0


def cmd_label(args) -> int:
    seed = _resolve_seed(args)
    cfg = _config(args, seed)
    rs = cfg.source.materialize()
    oracle = TerminalOracle(rs)
    report = experiment2(cfg, oracle=oracle)
    for name, path in sorted(report.paths.items()):
        print(f"{name}: {path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import LabelSession, create_app

    seed = _resolve_seed(args)
    strategy_cls = STRATEGIES[args.strategy]
    strategy = strategy_cls() if args.strategy != "kmeans_bagging" else KMeansBaggingSampling(
        feature_range=(args.features_min, args.features_max),
        cluster_range=(args.clusters_min, args.clusters_max),
    )
    cfg = _config(args, seed)
    rs = cfg.source.materialize()
    session = LabelSession(rs, cfg, strategy=strategy,
                           session_id=args.session_id, timeout=args.timeout)
    session.start()
    print(f"session {session.session_id}: {cfg.n_runs} runs on {len(rs)} records; "
          f"POST labels to /session/{session.session_id}/labels")
    uvicorn.run(create_app(session), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="activeids", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write a synthetic dataset")
    _add_synth_flags(p_synth)
    p_synth.add_argument("--seed", type=int, default=None)
    p_synth.add_argument("--out", default=_default_out())
    p_synth.set_defaults(fn=cmd_synth)

    p_exp1 = sub.add_parser("exp1", help="sampling-method evaluation")
    _add_dataset_flags(p_exp1)
    _add_common_flags(p_exp1)
    p_exp1.add_argument("--runs", type=int, default=30, help="runs per strategy")
    p_exp1.set_defaults(fn=cmd_exp1)

    p_exp2 = sub.add_parser("exp2", help="cumulative per-host probabilities")
    _add_dataset_flags(p_exp2)
    _add_common_flags(p_exp2)
    p_exp2.add_argument("--runs", type=int, default=10, help="number of runs")
    p_exp2.set_defaults(fn=cmd_exp2)

    p_label = sub.add_parser("label", help="exp2 with a terminal oracle")
    _add_dataset_flags(p_label)
    _add_common_flags(p_label)
    p_label.add_argument("--runs", type=int, default=10)
    p_label.set_defaults(fn=cmd_label)

    p_serve = sub.add_parser("serve", help="start the labeling service")
    _add_dataset_flags(p_serve)
    _add_common_flags(p_serve)
    p_serve.add_argument("--runs", type=int, default=10)
    p_serve.add_argument("--strategy", choices=sorted(STRATEGIES), default="kmeans_bagging")
    p_serve.add_argument("--features-min", type=int, default=20)
    p_serve.add_argument("--features-max", type=int, default=35)
    p_serve.add_argument("--clusters-min", type=int, default=30)
    p_serve.add_argument("--clusters-max", type=int, default=50)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--session-id", default="default")
    p_serve.add_argument("--timeout", type=float, default=30 * 60.0)
    p_serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DatasetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
