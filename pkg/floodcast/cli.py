"""Command line entry point.

Every command prints a JSON summary on stdout. Failures print
``{"error": <code>, "message": <text>}`` on stderr and exit with 2 for
floodcast errors and usage errors, 1 for anything unexpected.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from floodcast.data_store import (
    WEATHER_COLUMNS,
    WEATHER_FILE,
    load_relational,
    save_relational,
    save_table,
)
from floodcast.errors import (
    ConfigInvalidError,
    FloodcastError,
    IoFailureError,
    UnknownCommandError,
    UnknownEventError,
)
from floodcast.eval import (
    baseline_predictors,
    correlation_shift,
    run_variant_study,
    split_correlations,
    write_report,
)
from floodcast.features import (
    ALL_FEATURES,
    SPATIAL_FEATURES,
    apply_scaler,
    event_summary,
    fit_scaler,
    temporal_features,
    weather_frame,
)
from floodcast.model import (
    ArchConfig,
    TrainedModel,
    build_model,
    fit_fold,
    parse_arch_config,
    predict,
    prepare_fold,
)
from floodcast.neuralnet import grad_check
from floodcast.nas import (
    GridSpec,
    RunLogStore,
    export_runs,
    grid_preset,
    run_search,
    select_champion,
)
from floodcast.pipeline import (
    PREPARED_DIR,
    PipelineConfig,
    feature_tables,
    load_config,
    load_tables,
)
from floodcast.synth_hydro import gen_dataset, make_roster
from floodcast.windowing import (
    INDEX_COLUMNS,
    SampleBatch,
    build_samples,
    plan_for_events,
)

logger = logging.getLogger(__name__)

EXIT_FLOODCAST = 2
EXIT_INTERNAL = 1
GRAD_CHECK_TOLERANCE = 1e-4
SCALER_FILE = "scaler.json"
SUMMARY_FILE = "event_summary.csv"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UnknownCommandError(message)


def _emit(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, sort_keys=True, default=str))


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e}") from e
    return path


def _write_csv(frame: pd.DataFrame, path: Path, **options: Any) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, **options)
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e}") from e
    return path


def _arch(config: PipelineConfig, path: Optional[str]) -> ArchConfig:
    if path is None:
        return config.arch
    file = Path(path)
    return parse_arch_config(file.read_text() if file.is_file() else path)


# %% commands
def cmd_gen_data(args: argparse.Namespace, config: PipelineConfig) -> Dict[str, Any]:
    if config.data_dir is None:
        raise ConfigInvalidError("gen-data needs --data-dir or FLOODCAST_DATA_DIR")
    roster = make_roster(
        config.n_events, config.test_fraction, config.include_short_event
    )
    dataset = gen_dataset(
        config.n_segments,
        config.n_gauges,
        config.seed,
        bounds_m=config.bounds_m,
        roster=roster,
        idw_power=config.idw_power,
    )
    written = save_relational(dataset, config.data_dir)
    return {"data_dir": config.data_dir, "files": [p.name for p in written]}


def cmd_prepare(args: argparse.Namespace, config: PipelineConfig) -> Dict[str, Any]:
    data_dir = config.require_data_dir()
    out = Path(args.out) if args.out else data_dir / PREPARED_DIR
    dataset = load_relational(data_dir)
    tables = feature_tables(dataset, data_dir, config.idw_power, from_raw=True)
    by_id = {t.event_id: t for t in tables}
    train_ids = [e for e in dataset.event_ids("train") if e in by_id]
    scaler = fit_scaler([by_id[e] for e in train_ids], ALL_FEATURES)
    paths = [save_table(weather_frame(tables), WEATHER_COLUMNS, out / WEATHER_FILE)]
    paths.append(_write_text(out / SCALER_FILE, scaler.to_json() + "\n"))
    summary = pd.DataFrame(
        [
            {
                "event_id": t.event_id,
                "split": dataset.event(t.event_id).split,
                **event_summary(t),
            }
            for t in tables
        ]
    )
    paths.append(_write_csv(summary, out / SUMMARY_FILE, index=False))
    return {"out": out, "files": [p.name for p in paths], "scaler": scaler.digest}


def cmd_train(args: argparse.Namespace, config: PipelineConfig) -> Dict[str, Any]:
    arch = _arch(config, args.arch)
    dataset, tables = load_tables(config)
    plan = plan_for_events(dataset.events, arch.look_back)
    if args.holdout_event not in plan.train_event_ids:
        raise UnknownEventError(
            f"{args.holdout_event!r} is not a training event of the rotation"
        )
    data = prepare_fold(
        tables,
        plan.fold(args.holdout_event),
        plan.test_event_ids,
        arch.look_back,
        arch.include_max15,
    )
    trained = fit_fold(arch, data, config.train)
    path = trained.save(args.out)
    return {
        "model": path,
        "best_epoch": trained.best_epoch,
        "val_mae_m": trained.best_val_mae,
        "n_params": trained.model.n_parameters,
    }


def cmd_nas(args: argparse.Namespace, config: PipelineConfig) -> Dict[str, Any]:
    grid_arg = args.grid or config.grid
    if Path(grid_arg).is_file():
        try:
            grid = GridSpec.model_validate_json(Path(grid_arg).read_text())
        except ValidationError as e:
            raise ConfigInvalidError(f"{grid_arg}: {e}") from e
    else:
        grid = grid_preset(grid_arg)
    dataset, tables = load_tables(config)
    plan = plan_for_events(dataset.events, max(grid.look_backs))
    out = Path(args.out)
    log = RunLogStore(out)
    records = list(
        run_search(grid, tables, plan, log, config.train, workers=config.workers)
    )
    champion = select_champion(log)
    _write_text(out / "champion.json", champion.model_dump_json(indent=2) + "\n")
    export_runs(log, out, k=args.top_k)
    return {
        "run_log": log.path,
        "new_runs": len(records),
        "champion": champion.run_id,
        "mae_m": champion.mae_m,
        "rmse_m": champion.rmse_m,
    }


def cmd_evaluate(args: argparse.Namespace, config: PipelineConfig) -> Dict[str, Any]:
    arch = _arch(config, args.arch)
    dataset, tables = load_tables(config)
    reports = run_variant_study(
        tables,
        dataset.events,
        base=arch,
        tc=config.train,
        models_dir=args.models,
        workers=config.workers,
        pooled=args.pooled,
        all_variants=args.variants,
    )
    plan = plan_for_events(dataset.events, arch.look_back)
    reports += baseline_predictors(
        tables, plan, look_back=arch.look_back, pooled=args.pooled
    )
    out = Path(args.report)
    write_report(reports, out, layout=args.layout)
    matrices = {
        split or "all": split_correlations(tables, dataset.events, split)
        for split in ("train", "test", None)
    }
    for name, matrix in matrices.items():
        suffix = "" if name == "all" else f"_{name}"
        _write_csv(matrix, out / f"correlations{suffix}.csv")
    shift = correlation_shift(matrices["train"], matrices["test"])
    _write_csv(shift, out / "correlations_shift.csv")
    return {
        "report": out,
        "variants": [r.variant for r in reports],
        "mae_m": {r.variant: r.mae_m for r in reports},
    }


def cmd_predict(args: argparse.Namespace, config: PipelineConfig) -> Dict[str, Any]:
    trained = TrainedModel.load(args.model)
    if trained.scaler is None:
        raise ConfigInvalidError(f"{args.model} carries no scaler")
    _, tables = load_tables(config, with_depths=False)
    if args.event not in tables:
        raise UnknownEventError(f"no usable event {args.event!r}")
    table = apply_scaler(trained.scaler, tables[args.event])
    batch = build_samples(
        table, trained.config.look_back, trained.config.include_max15
    )
    depths = predict(trained, batch, mode=args.mode)
    frame = batch.index[["event_id", "segment_id", "timestamp"]].copy()
    frame["depth_m"] = depths
    out = _write_csv(
        frame, Path(args.out), index=False, date_format="%Y-%m-%dT%H:%M:%S"
    )
    return {"out": out, "rows": len(frame), "mode": args.mode}


def random_batch(config: ArchConfig, n: int, seed: int = 0) -> SampleBatch:
    """Standard normal inputs and uniform targets shaped for ``config``."""
    rng = np.random.default_rng(seed)
    features = temporal_features(config.include_max15)
    index = pd.DataFrame(
        {
            "event_id": "check",
            "segment_id": np.arange(n),
            "hour": config.look_back,
            "timestamp": pd.Timestamp("2016-01-01"),
        },
        columns=INDEX_COLUMNS,
    )
    return SampleBatch(
        temporal=rng.standard_normal((n, config.look_back, len(features))),
        spatial=rng.standard_normal((n, len(SPATIAL_FEATURES))),
        targets=rng.uniform(0.0, 0.2, n),
        index=index,
        look_back=config.look_back,
        features=features,
    )


def cmd_grad_check(
    args: argparse.Namespace, config: PipelineConfig
) -> Dict[str, Any]:
    arch = _arch(config, args.arch)
    model = build_model(arch, seed=config.seed, reg=config.train.reg)
    result = grad_check(
        model, random_batch(arch, args.samples, config.seed), eps=args.eps
    )
    return {
        "max_rel_error": result.max_rel_error,
        "worst_tensor": result.worst_tensor,
        "passed": result.passed(GRAD_CHECK_TOLERANCE),
    }


COMMANDS: Dict[str, Callable[[argparse.Namespace, PipelineConfig], Dict[str, Any]]] = {
    "gen-data": cmd_gen_data,
    "prepare": cmd_prepare,
    "train": cmd_train,
    "nas": cmd_nas,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "grad-check": cmd_grad_check,
}


# %% parser
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline settings")
    common.add_argument("--data-dir", help="data root (default $FLOODCAST_DATA_DIR)")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument(
        "--flood-prone",
        type=int,
        metavar="K",
        help="restrict to the K segments with the highest mean depth",
    )
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )

    parser = _Parser(prog="floodcast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-data", parents=[common], help="synthetic dataset")
    p.add_argument("--segments", type=int, dest="n_segments")
    p.add_argument("--gauges", type=int, dest="n_gauges")
    p.add_argument("--events", type=int, dest="n_events")
    p.add_argument("--test-fraction", type=float)
    p.add_argument("--bounds", type=float, nargs=2, dest="bounds_m")
    p.add_argument("--idw-power", type=float)
    p.add_argument("--include-short-event", action="store_true", default=None)

    p = sub.add_parser("prepare", parents=[common], help="features and scaler")
    p.add_argument("--out", help=f"output directory (default <data>/{PREPARED_DIR})")
    p.add_argument("--idw-power", type=float)

    p = sub.add_parser("train", parents=[common], help="train one fold")
    p.add_argument("--arch", help="architecture JSON file or text")
    p.add_argument("--holdout-event", required=True)
    p.add_argument("--out", required=True, help="model file")

    p = sub.add_parser("nas", parents=[common], help="architecture search")
    p.add_argument("--grid", help="preset name or grid JSON file")
    p.add_argument("--out", required=True, help="run log directory")
    p.add_argument("--top-k", type=int, default=120)

    p = sub.add_parser("evaluate", parents=[common], help="protocol report")
    p.add_argument("--arch", help="architecture JSON file or text")
    p.add_argument("--models", required=True, help="fold models directory")
    p.add_argument("--report", required=True, help="report directory")
    p.add_argument(
        "--variants",
        action="store_true",
        help="report all eight recurrent variants, not only the architecture",
    )
    p.add_argument("--layout", choices=["mini", "full"], default="mini")
    p.add_argument("--pooled", action="store_true")

    p = sub.add_parser("predict", parents=[common], help="hourly depths")
    p.add_argument("--model", required=True)
    p.add_argument("--event", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=["report", "metric"], default="report")

    p = sub.add_parser("grad-check", parents=[common], help="gradient check")
    p.add_argument("--arch", help="architecture JSON file or text")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--eps", type=float, default=1e-5)
    return parser


_CONFIG_FLAGS = (
    "data_dir",
    "seed",
    "workers",
    "flood_prone",
    "n_segments",
    "n_gauges",
    "n_events",
    "test_fraction",
    "bounds_m",
    "idw_power",
    "include_short_event",
)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=args.log_level,
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        overrides = {k: getattr(args, k, None) for k in _CONFIG_FLAGS}
        config = load_config(args.config, overrides)
        _emit(COMMANDS[args.command](args, config))
    except FloodcastError as e:
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return EXIT_FLOODCAST
    except Exception as e:
        logger.exception("Unexpected failure")
        print(json.dumps({"error": "Internal", "message": str(e)}), file=sys.stderr)
        return EXIT_INTERNAL
    return 0


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run_command(argv))
