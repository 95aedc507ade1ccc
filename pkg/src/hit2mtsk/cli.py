"""Command-line entry point.

Subcommands: train, crossval, explain, predict, baseline.  A JSON
config file supplies pipeline settings; command-line flags override it.
Every artifact embeds the resolved config, seed and dataset fingerprint.

Exit codes: 0 success, 2 config/usage error, 3 data error, 4 training
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .aco import AcoConfigError
from .data import (
    Dataset,
    ParseError,
    dataset_fingerprint,
    load_csv,
    load_keel,
    load_keel_folds,
    make_folds,
)
from .evaluate import (
    REFERENCE_RMSE,
    TrainingFailedError,
    case_study,
    explainability_block,
    quantization_profile,
    reference_for,
    run_cv,
)
from .inference import NotTrainedError, predict, predict_values
from .persist import (
    dumps,
    load_model,
    save_model,
    save_rules,
    save_universe,
    write_xy_csv,
)
from .pipeline import TrainConfig, derive_seed, train_model
from .rules import RuleUnfittableError
from .universe import EmptyUniverseError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TRAIN = 4


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _load_config(args) -> TrainConfig:
    base: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise CliError(EXIT_CONFIG, f"config file not found: {path}")
        try:
            base = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_CONFIG, f"config is not valid JSON: {exc}")
    try:
        cfg = TrainConfig.from_dict(base)
        if getattr(args, "variant", None):
            degree = int(args.variant.lower().lstrip("d"))
            from dataclasses import replace

            cfg = replace(cfg, generation=replace(cfg.generation, degree=degree))
        if getattr(args, "sets", None):
            from dataclasses import replace

            cfg = replace(cfg, num_sets=args.sets)
        if getattr(args, "seed", None) is not None:
            from dataclasses import replace

            cfg = replace(cfg, seed=args.seed)
        return cfg
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"bad configuration: {exc}")


def _load_dataset(args) -> Dataset:
    path = Path(args.data)
    if not path.exists():
        raise CliError(EXIT_DATA, f"data file not found: {path}")
    try:
        if args.format == "keel":
            return load_keel(path)
        if not args.target:
            raise CliError(EXIT_CONFIG, "--target is required for csv data")
        return load_csv(path, args.target)
    except ParseError as exc:
        raise CliError(EXIT_DATA, str(exc))


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_trace(path: Path, trace, manifest) -> None:
    lines = ["# " + json.dumps(dict(manifest), sort_keys=True)]
    lines.append("iteration,best_rmse")
    for it, best in trace:
        lines.append(f"{it},{repr(float(best))}")
    path.write_text("\n".join(lines) + "\n")


def cmd_train(args) -> int:
    config = _load_config(args)
    dataset = _load_dataset(args)
    result = train_model(dataset, config)
    out = _outdir(args)
    manifest = result.model.manifest
    save_model(result.model, out / "model.json")
    save_rules(
        result.model.rules,
        dataset.target_name,
        out / "rules.txt",
        out / "rules.json",
        manifest=manifest,
    )
    _write_trace(out / "aco_trace.csv", result.trace, manifest)
    if args.save_universe:
        save_universe(result.universe, out / "universe.json")
    print(f"trained {len(result.model.rules)} rules "
          f"(universe {len(result.universe)}, coverage {result.universe.coverage:.3f})")
    print(f"selection rmse {result.model.manifest['selection_cost']:.6g}")
    print(f"artifacts written to {out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model_path = Path(args.model)
    if not model_path.exists():
        raise CliError(EXIT_DATA, f"model file not found: {model_path}")
    try:
        model = load_model(model_path)
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_DATA, f"cannot load model: {exc}")
    dataset = _load_dataset(args)
    try:
        values, fired_counts, fallback = predict_values(model, dataset)
    except NotTrainedError as exc:
        raise CliError(EXIT_TRAIN, str(exc))
    except ValueError as exc:
        raise CliError(EXIT_DATA, str(exc))
    out = _outdir(args)
    rows = []
    for i in range(values.size):
        rows.append(
            f"{repr(float(values[i]))},{repr(float(dataset.y[i]))},"
            f"{int(fired_counts[i])},{int(fallback[i])}"
        )
    manifest = {
        "model_manifest": dict(model.manifest),
        "data_fingerprint": dataset_fingerprint(dataset),
    }
    text = ["# " + json.dumps(manifest, sort_keys=True)]
    text.append("prediction,target,fired_rules,fallback")
    text.extend(rows)
    (out / "predictions.csv").write_text("\n".join(text) + "\n")
    rmse = float(np.sqrt(np.mean((values - dataset.y) ** 2)))
    print(f"predicted {values.size} rows, rmse {rmse:.6g}, "
          f"fallback rate {float(np.mean(fallback)):.4f}")
    print(f"wrote {out / 'predictions.csv'}")
    return EXIT_OK


def cmd_crossval(args) -> int:
    config = _load_config(args)
    path = Path(args.data)
    if not path.exists():
        raise CliError(EXIT_DATA, f"data path not found: {path}")
    try:
        if args.format == "keel":
            if path.is_dir():
                folds = load_keel_folds(path, args.name)
            else:
                folds = make_folds(load_keel(path), k=5, seed=config.seed)
        else:
            if not args.target:
                raise CliError(EXIT_CONFIG, "--target is required for csv data")
            folds = make_folds(load_csv(path, args.target), k=5, seed=config.seed)
    except (ParseError, FileNotFoundError) as exc:
        raise CliError(EXIT_DATA, str(exc))

    name = args.name or folds[0].train.name
    if args.name and not reference_for(args.name):
        known = ", ".join(sorted(REFERENCE_RMSE))
        print(f"no stored reference for {args.name!r}; known: {known}")
    try:
        report = run_cv(
            folds, config, dataset_name=name,
            explain=args.explain, threads=args.threads,
        )
    except TrainingFailedError as exc:
        raise CliError(EXIT_TRAIN, str(exc))
    out = _outdir(args)
    doc = report.to_dict()
    doc["manifest"] = {
        "config": config.to_dict(),
        "seed": config.seed,
        "fold_fingerprints": [
            dataset_fingerprint(f.train) for f in folds
        ],
    }
    (out / "report.json").write_text(dumps(doc))
    print(f"{name} [{report.variant}] mean rmse {report.mean_rmse:.6g} "
          f"over {len(report.fold_rmse)} folds")
    if report.reference:
        print("reference scores:")
        for method, value in sorted(report.reference.items()):
            print(f"  {method:>12}: {value}")
    if report.warning:
        print(f"warning: {report.warning}", file=sys.stderr)
    print(f"wrote {out / 'report.json'}")
    return EXIT_OK


def cmd_explain(args) -> int:
    model_path = Path(args.model)
    if not model_path.exists():
        raise CliError(EXIT_DATA, f"model file not found: {model_path}")
    model = load_model(model_path)
    if not model.rules:
        raise CliError(EXIT_TRAIN, "model has no rules to explain")
    dataset = _load_dataset(args)
    out = _outdir(args)
    target = model.target_partition.variable
    save_rules(
        model.rules, target, out / "rules.txt", out / "rules.json",
        manifest=model.manifest,
    )
    block = explainability_block(
        model, dataset, seed=derive_seed(int(model.manifest.get("seed", 0)), 201)
    )
    doc = block.to_dict()
    doc["manifest"] = {
        "model_manifest": dict(model.manifest),
        "data_fingerprint": dataset_fingerprint(dataset),
    }
    (out / "explain.json").write_text(dumps(doc))

    lines = []
    limit = min(args.max_rows, dataset.n_rows)
    for i in range(limit):
        x = {name: float(dataset.X[i, j]) for j, name in enumerate(dataset.feature_names)}
        p = predict(model, x)
        lines.append(
            f"row {i}: prediction {p.value:.6g}, target {dataset.y[i]:.6g}, "
            f"{len(p.fired_rules)} rules fired"
            + (" (fallback)" if p.fallback_used else "")
        )
        for fr in sorted(p.fired_rules, key=lambda r: -r.weight)[:5]:
            rule = model.rules[fr.index]
            clause = " AND ".join(f"{v} is {s}" for v, s in rule.antecedent)
            lines.append(
                f"    rule {fr.index}: IF {clause} THEN {target} is "
                f"{rule.consequent_set}; firing [{fr.firing[0]:.3f}, "
                f"{fr.firing[1]:.3f}], output {fr.output:.6g}, weight {fr.weight:.4f}"
            )
    (out / "row_explanations.txt").write_text("\n".join(lines) + "\n")
    print(f"explained {limit} rows; artifacts in {out}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    config = _load_config(args)
    dataset = _load_dataset(args)
    try:
        study = case_study(dataset, config, holdout_fraction=args.holdout)
    except (EmptyUniverseError, RuleUnfittableError, TrainingFailedError) as exc:
        raise CliError(EXIT_TRAIN, str(exc))
    out = _outdir(args)
    manifest = study.hybrid_model.manifest
    distinct, single_rows, n_sets = quantization_profile(
        study.baseline_model, study.test
    )
    doc = {
        "hybrid": study.hybrid.to_dict(),
        "baseline": study.baseline.to_dict(),
        "banding": {
            "distinct_single_fire_values": distinct,
            "single_fire_rows": single_rows,
            "num_output_sets": n_sets,
        },
        "manifest": dict(manifest),
    }
    (out / "report.json").write_text(dumps(doc))
    write_xy_csv(
        out / "hybrid_scatter.csv", ("actual", "predicted"),
        (study.test.y, study.hybrid_values), manifest,
    )
    write_xy_csv(
        out / "baseline_scatter.csv", ("actual", "predicted"),
        (study.test.y, study.baseline_values), manifest,
    )
    write_xy_csv(
        out / "hybrid_residuals.csv", ("residual",),
        (study.hybrid_values - study.test.y,), manifest,
    )
    write_xy_csv(
        out / "baseline_residuals.csv", ("residual",),
        (study.baseline_values - study.test.y,), manifest,
    )
    print(f"hybrid rmse {study.hybrid.mean_rmse:.6g} vs "
          f"baseline rmse {study.baseline.mean_rmse:.6g}")
    print(f"banding: {distinct} distinct values on {single_rows} "
          f"single-fire rows ({n_sets} output sets)")
    print(f"artifacts written to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hit2mtsk",
        description="Hybrid interval type-2 fuzzy regression with ACO rule selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, data=True):
        if data:
            p.add_argument("--data", required=True, help="data file or fold directory")
            p.add_argument("--format", choices=("keel", "csv"), default="csv")
            p.add_argument("--target", help="target column (csv format)")
        p.add_argument("--out", default="out", help="output directory")

    def add_train_opts(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--variant", choices=("d1", "d2", "d3"),
                       help="polynomial degree preset")
        p.add_argument("--sets", type=int, help="sets per partition")
        p.add_argument("--seed", type=int, help="master seed")

    p = sub.add_parser("train", help="train a model and save the bundle")
    add_common(p)
    add_train_opts(p)
    p.add_argument("--save-universe", action="store_true",
                   help="also dump the full rule universe")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict rows with a saved model")
    add_common(p)
    p.add_argument("--model", required=True, help="model.json path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("crossval", help="5-fold cross-validation")
    add_common(p)
    add_train_opts(p)
    p.add_argument("--name", help="dataset name for reference lookup")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--explain", action="store_true",
                   help="attach explainability metrics")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("explain", help="rule export + explainability metrics")
    add_common(p)
    p.add_argument("--model", required=True, help="model.json path")
    p.add_argument("--max-rows", type=int, default=10,
                   help="rows to itemize in row_explanations.txt")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("baseline", help="hybrid vs Mamdani-baseline comparison")
    add_common(p)
    add_train_opts(p)
    p.add_argument("--holdout", type=float, default=0.2)
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AcoConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EmptyUniverseError, RuleUnfittableError, TrainingFailedError,
            NotTrainedError) as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return EXIT_TRAIN
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
