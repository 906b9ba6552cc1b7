"""
Body Fat Bench - CLI Entry Point
Body-fat estimators and the reproducible benchmark harness

    python main.py summarize --data data/bodyfat.csv --units imperial
    python main.py fit --model ols --data data/bodyfat.csv --seed 0 --out results/ols
    python main.py sweep --seeds 0..199 --out results/sweep
"""
import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from dotenv import load_dotenv

# Load env vars immediately
load_dotenv()

from config import config, load_config_from_env
from errors import BodyFatError, ConfigurationError, ParseError

logger = logging.getLogger("bodyfat")

# Exit codes
EXIT_OK = 0
EXIT_IO = 5


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, ensure_ascii=False))


def _flag(parser: argparse.ArgumentParser, *names: str, **kwargs) -> None:
    kwargs.setdefault("default", None)
    parser.add_argument(*names, **kwargs)


def _add_data_args(parser: argparse.ArgumentParser) -> None:
    _flag(parser, "--data", dest="data_path", help="Canonical CSV (default $BODYFAT_DATA)")
    _flag(parser, "--units", choices=["metric", "imperial"], help="Unit regime of the CSV")
    _flag(parser, "--clean", action="store_const", const=True, help="Drop flagged records")


def _add_experiment_args(parser: argparse.ArgumentParser) -> None:
    _flag(parser, "--config", dest="config_file", help="Flat JSON config; flags override it")
    _add_data_args(parser)
    _flag(parser, "--model", choices=["ols", "gd", "mlp", "navy", "bmi-baseline"])
    _flag(parser, "--features", help="Comma-separated feature names")
    _flag(parser, "--target")
    _flag(parser, "--seed", type=int)
    _flag(parser, "--ratio", type=float, help="Train fraction (default 0.8)")
    _flag(parser, "--out", dest="output_dir", help="Artifact directory")
    _flag(parser, "--svg", action="store_const", const=True, help="Also render SVG plots")

    gd = parser.add_argument_group("gradient descent (--model gd)")
    _flag(gd, "--gd-learning-rate", type=float)
    _flag(gd, "--gd-max-epochs", type=int)
    _flag(gd, "--gd-tolerance", type=float)

    mlp = parser.add_argument_group("feedforward regressor (--model mlp)")
    _flag(mlp, "--mlp-hidden-dims", help="Comma-separated hidden widths, e.g. 16,8")
    _flag(mlp, "--mlp-activation", choices=["relu", "tanh", "identity"])
    _flag(mlp, "--mlp-learning-rate", type=float)
    _flag(mlp, "--mlp-batch-size", type=int)
    _flag(mlp, "--mlp-max-epochs", type=int)
    _flag(mlp, "--mlp-patience", type=int)
    _flag(mlp, "--mlp-min-delta", type=float)
    _flag(mlp, "--mlp-holdout-fraction", type=float)


EXPERIMENT_KEYS = (
    "data_path", "units", "clean", "model", "features", "target", "seed", "ratio",
    "output_dir", "svg",
    "gd_learning_rate", "gd_max_epochs", "gd_tolerance",
    "mlp_hidden_dims", "mlp_activation", "mlp_learning_rate", "mlp_batch_size",
    "mlp_max_epochs", "mlp_patience", "mlp_min_delta", "mlp_holdout_fraction",
)


def _experiment_config(args: argparse.Namespace):
    from services.experiment import load_experiment_config

    overrides = {key: getattr(args, key, None) for key in EXPERIMENT_KEYS}
    return load_experiment_config(args.config_file, **overrides)


def _read_input_csv(path: Path) -> list[dict[str, float]]:
    import pandas as pd

    try:
        frame = pd.read_csv(path)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise ParseError(f"cannot read input CSV {path}: {e}") from None
    rows = []
    for i, record in enumerate(frame.to_dict(orient="records")):
        row = {}
        for name, value in record.items():
            name = str(name).strip()
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParseError(f"non-numeric value '{value}'", row=i + 2, column=name) from None
            if not math.isfinite(value):
                raise ParseError("missing or non-finite value", row=i + 2, column=name)
            row[name] = value
        rows.append(row)
    return rows


def _parse_input(text: str, units: str) -> list[dict[str, float]]:
    """CSV path, or inline `name=value,name=value`"""
    from services.experiment import to_metric

    path = Path(text)
    if path.is_file():
        rows = _read_input_csv(path)
    else:
        row = {}
        for part in text.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise ConfigurationError(f"expected name=value, got '{part}'")
            name, value = part.split("=", 1)
            try:
                row[name.strip()] = float(value)
            except ValueError:
                raise ConfigurationError(f"non-numeric value for '{name.strip()}': '{value}'") from None
        rows = [row]
    if not rows:
        raise ConfigurationError("no input rows")
    return [to_metric(r, units) for r in rows]


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------

def cmd_summarize(args: argparse.Namespace) -> int:
    from dataset import drop_flagged, load_csv, summarize

    records = load_csv(args.data_path or config.data.path, args.units or config.data.units)
    if args.clean:
        records = drop_flagged(records)
    _print_json(summarize(records).to_dict())
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    from services.experiment import run_experiment

    cfg = _experiment_config(args)
    if cfg.output_dir is None:
        cfg = cfg.model_copy(update={"output_dir": config.harness.output_dir})
    result = run_experiment(cfg)
    summary = result.report.to_dict()
    summary.pop("pairs")
    summary["output_dir"] = cfg.output_dir
    _print_json(summary)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    from services.artifacts import emit_scatter, write_json
    from services.experiment import REPORT_FILE, SCATTER_FILE, evaluate_model_file

    report = evaluate_model_file(
        args.model_file,
        data_path=args.data_path or config.data.path,
        seed=args.seed,
        ratio=args.ratio,
        units=args.units,
        target=args.target,
        clean=bool(args.clean),
    )
    if args.output_dir:
        out = Path(args.output_dir)
        write_json(out / REPORT_FILE, report.to_dict())
        emit_scatter(report, out / SCATTER_FILE, svg=bool(args.svg))
    payload = report.to_dict()
    payload.pop("pairs")
    _print_json(payload)
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    from services.experiment import load_model, predict_formula, predict_rows

    rows = _parse_input(args.input, args.units or "metric")
    if args.formula:
        predictions = [predict_formula(args.formula, row, clamp=args.clamp) for row in rows]
    elif args.model_file:
        predictions = predict_rows(load_model(args.model_file), rows)
    else:
        raise ConfigurationError("predict needs --model-file or --formula")
    _print_json({"predictions": predictions})
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    from services.experiment import parse_seeds, sweep_seeds

    cfg = _experiment_config(args)
    if cfg.output_dir is None:
        cfg = cfg.model_copy(update={"output_dir": config.harness.output_dir})
    result = sweep_seeds(cfg, parse_seeds(args.seeds), workers=args.workers)
    _print_json({"seeds": len(result.reports), "percentiles": result.percentiles})
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    from services.artifacts import emit_scatter, emit_trace, read_report, read_trace_csv
    from services.experiment import REPORT_FILE, SCATTER_FILE, TRACE_FILE

    out = Path(args.output_dir)
    report = read_report(out / REPORT_FILE)
    written = emit_scatter(report, out / SCATTER_FILE, svg=args.svg)
    trace_path = out / TRACE_FILE
    if trace_path.exists():
        written += emit_trace(read_trace_csv(trace_path), trace_path, svg=args.svg)
    _print_json({
        "model_descriptor": report.model_descriptor,
        "split_seed": report.split_seed,
        "n": report.n,
        "mae": report.mae,
        "rmse": report.rmse,
        "r2": report.r2,
        "artifacts": [str(p) for p in written],
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bodyfat",
        description="Body-fat estimators and reproducible benchmark harness",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="Cohort mean ± SD and anomaly warnings")
    _add_data_args(p)
    p.set_defaults(handler=cmd_summarize)

    p = sub.add_parser("fit", help="Run one experiment and write its artifacts")
    _add_experiment_args(p)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("evaluate", help="Score a saved model on a seeded test split")
    _flag(p, "--model-file", required=True)
    _add_data_args(p)
    _flag(p, "--seed", type=int, required=True)
    _flag(p, "--ratio", type=float)
    _flag(p, "--target")
    _flag(p, "--out", dest="output_dir")
    _flag(p, "--svg", action="store_const", const=True)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("predict", help="Predict from a saved model or a closed-form formula")
    _flag(p, "--model-file")
    _flag(p, "--formula", choices=["bmi", "navy", "siri"])
    _flag(p, "--input", required=True, help="CSV path or name=value,... (kg, cm, g/cm³)")
    _flag(p, "--units", choices=["metric", "imperial"])
    p.add_argument("--clamp", action="store_true", help="Clamp formula output to [0, 75]")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("sweep", help="Repeat an experiment over split seeds")
    _add_experiment_args(p)
    _flag(p, "--seeds", default="0..199", help="'0..199' or '1,2,3'")
    _flag(p, "--workers", type=int)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("report", help="Re-emit scatter/trace artifacts of a run directory")
    _flag(p, "--out", dest="output_dir", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(handler=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_config_from_env()
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=(args.log_level or config.harness.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.handler(args)
    except BodyFatError as e:
        where = f"[{e.stage}]" if e.stage else ""
        print(f"error{where}: {e.message}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
