"""
Experiment Harness - ingest → split → fit → evaluate → report

Stages run in order; any error leaving a stage is tagged with the stage name.
"""
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from config import config
from dataset.features import select_features, split, take
from dataset.loader import IN_TO_CM, LB_TO_KG, drop_flagged, load_csv
from errors import BodyFatError, ConfigurationError, DataError
from estimators.formulas import bmi, navy_bf_male, siri_bf
from estimators.linear import build_gd_config, fit_gd, fit_ols
from estimators.neural import build_train_config, forward_batch, train_mlp
from models.linear import LinearModel
from models.mlp import MlpModel
from models.records import AnthropometricRecord, DatasetSplit
from models.report import EvalReport, SweepResult, TrainingTrace
from services.artifacts import emit_scatter, emit_trace, read_json, write_json
from services.metrics import evaluate

logger = logging.getLogger(__name__)

ModelKind = Literal["ols", "gd", "mlp", "navy", "bmi-baseline"]
FittedModel = Union[LinearModel, MlpModel]

# Artifact file names
REPORT_FILE = "report.json"
SCATTER_FILE = "scatter.csv"
TRACE_FILE = "trace.csv"
MODEL_FILE = "model.json"
CONFIG_FILE = "config.json"
SWEEP_FILE = "sweep.json"


class ExperimentConfig(BaseModel):
    """
    Flat experiment description; every key has a matching CLI flag
    (underscores become dashes).
    """
    data_path: str = Field(default_factory=lambda: config.data.path, description="Canonical CSV")
    units: Literal["metric", "imperial"] = Field(default_factory=lambda: config.data.units)
    clean: bool = Field(default_factory=lambda: config.data.clean, description="Drop flagged records")
    model: ModelKind = Field(default="ols")
    features: list[str] = Field(default_factory=lambda: list(config.regression.features))
    target: str = Field(default_factory=lambda: config.regression.target)
    ratio: float = Field(default_factory=lambda: config.harness.split_ratio, gt=0, lt=1)
    seed: int = Field(default_factory=lambda: config.harness.seed, ge=0, lt=2 ** 64)
    output_dir: Optional[str] = Field(default=None, description="Artifact directory; None writes nothing")
    svg: bool = Field(default=False, description="Also render SVG plots")

    # Gradient descent
    gd_learning_rate: Optional[float] = None
    gd_max_epochs: Optional[int] = None
    gd_tolerance: Optional[float] = None

    # MLP
    mlp_hidden_dims: Optional[list[int]] = None
    mlp_activation: Optional[str] = None
    mlp_learning_rate: Optional[float] = None
    mlp_batch_size: Optional[int] = None
    mlp_max_epochs: Optional[int] = None
    mlp_patience: Optional[int] = None
    mlp_min_delta: Optional[float] = None
    mlp_holdout_fraction: Optional[float] = None

    @field_validator("features", "mlp_hidden_dims", mode="before")
    @classmethod
    def _split_commas(cls, value):
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    def gd_config(self):
        return build_gd_config(
            learning_rate=self.gd_learning_rate,
            max_epochs=self.gd_max_epochs,
            tolerance=self.gd_tolerance,
        )

    def train_config(self):
        return build_train_config(
            seed=self.seed,
            hidden_dims=self.mlp_hidden_dims,
            activation=self.mlp_activation,
            learning_rate=self.mlp_learning_rate,
            batch_size=self.mlp_batch_size,
            max_epochs=self.mlp_max_epochs,
            early_stopping_patience=self.mlp_patience,
            early_stopping_min_delta=self.mlp_min_delta,
            holdout_fraction=self.mlp_holdout_fraction,
        )

    @property
    def effective_features(self) -> list[str]:
        if self.model == "bmi-baseline":
            return ["bmi"]
        if self.model == "navy":
            return ["abdomen", "neck", "height"]
        return list(self.features)


def build_experiment_config(file_values: Optional[dict] = None, **overrides) -> ExperimentConfig:
    """File values first, then non-None overrides (CLI flags win)"""
    values = dict(file_values or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(f"invalid experiment config: {e}") from None


def load_experiment_config(path: Optional[str] = None, **overrides) -> ExperimentConfig:
    file_values = {}
    if path:
        file_values = read_json(path)
        if not isinstance(file_values, dict):
            raise ConfigurationError(f"{path}: config must be a flat JSON object")
    return build_experiment_config(file_values, **overrides)


@dataclass(frozen=True)
class ExperimentResult:
    """Everything one run produced"""
    report: EvalReport
    split: DatasetSplit
    model: Optional[FittedModel] = None
    trace: Optional[TrainingTrace] = None


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag errors leaving the block with the pipeline stage"""
    try:
        yield
    except BodyFatError as e:
        raise e.with_stage(name)


# ----------------------------------------------------------------------
# Pipeline
# ----------------------------------------------------------------------

def load_records(cfg: ExperimentConfig) -> list[AnthropometricRecord]:
    with stage("ingest"):
        records = load_csv(cfg.data_path, cfg.units)
        if cfg.clean:
            kept = drop_flagged(records)
            logger.info(f"clean: dropped {len(records) - len(kept)} flagged records")
            records = kept
    return records


def fit_model(
    cfg: ExperimentConfig, train_records: Sequence[AnthropometricRecord]
) -> tuple[Optional[FittedModel], Optional[TrainingTrace]]:
    """Fit on training records only; navy has nothing to fit"""
    if cfg.model == "navy":
        return None, None
    features = cfg.effective_features
    with stage("features"):
        X, y = select_features(train_records, features, cfg.target)
    with stage("fit"):
        if cfg.model in ("ols", "bmi-baseline"):
            return fit_ols(X, y, features), None
        if cfg.model == "gd":
            return fit_gd(X, y, feature_names=features, gd_config=cfg.gd_config())
        return train_mlp(X, y, cfg.train_config(), features)


def predict_records(
    cfg: ExperimentConfig, model: Optional[FittedModel], records: Sequence[AnthropometricRecord]
) -> np.ndarray:
    if cfg.model == "navy":
        return np.array(
            [navy_bf_male(r.abdomen, r.neck, r.height, constants=config.navy) for r in records]
        )
    X, _ = select_features(records, cfg.effective_features, cfg.target)
    return predict_matrix(model, X)


def predict_matrix(model: FittedModel, X: np.ndarray) -> np.ndarray:
    if isinstance(model, MlpModel):
        return forward_batch(model, X)
    return model.predict(X)


def describe(cfg: ExperimentConfig, model: Optional[FittedModel]) -> str:
    if model is None:
        return f"navy({','.join(cfg.effective_features)})"
    return f"{cfg.model}:{model.descriptor}"


def _run_on_records(cfg: ExperimentConfig, records: Sequence[AnthropometricRecord]) -> ExperimentResult:
    with stage("split"):
        ds = split(records, cfg.ratio, cfg.seed)
    train_records = take(records, ds.train_indices)
    test_records = take(records, ds.test_indices)

    model, trace = fit_model(cfg, train_records)

    with stage("evaluate"):
        predictions = predict_records(cfg, model, test_records)
        _, y_test = select_features(test_records, [cfg.target], cfg.target)
        report = evaluate(y_test, predictions, describe(cfg, model), cfg.seed)
    return ExperimentResult(report=report, split=ds, model=model, trace=trace)


def write_artifacts(cfg: ExperimentConfig, result: ExperimentResult, output_dir: str | Path) -> list[Path]:
    out = Path(output_dir)
    with stage("emit"):
        written = [write_json(out / REPORT_FILE, result.report.to_dict())]
        written += emit_scatter(result.report, out / SCATTER_FILE, svg=cfg.svg)
        if result.trace is not None:
            written += emit_trace(result.trace, out / TRACE_FILE, svg=cfg.svg)
        if result.model is not None:
            written.append(write_json(out / MODEL_FILE, result.model.to_dict()))
        written.append(write_json(out / CONFIG_FILE, cfg.model_dump()))
    return written


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """
    One deterministic run: fits on the train indices, evaluates on the
    test indices, writes artifacts when `output_dir` is set.
    """
    records = load_records(cfg)
    result = _run_on_records(cfg, records)
    r = result.report
    logger.info(
        f"{r.model_descriptor} seed={cfg.seed}: "
        f"MAE={r.mae:.3f} RMSE={r.rmse:.3f} R²={r.r2:.3f} (n={r.n})"
    )
    if cfg.output_dir:
        for path in write_artifacts(cfg, result, cfg.output_dir):
            logger.info(f"wrote {path}")
    return result


def sweep_seeds(
    cfg: ExperimentConfig, seeds: Sequence[int], workers: Optional[int] = None
) -> SweepResult:
    """
    One run per distinct seed, merged in ascending seed order.

    Seeds run concurrently on a thread pool; each run owns its streams.
    """
    unique = sorted(set(int(s) for s in seeds))
    if not unique:
        raise ConfigurationError("seed list is empty")
    records = load_records(cfg)

    def run_one(seed: int) -> EvalReport:
        seed_cfg = cfg.model_copy(update={"seed": seed, "output_dir": None})
        try:
            return _run_on_records(seed_cfg, records).report
        except BodyFatError as e:
            e.message = f"seed {seed}: {e.message}"
            e.args = (e.message,)
            e.seed = seed
            raise

    max_workers = workers or config.harness.workers
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        reports = list(pool.map(run_one, unique))

    result = SweepResult.from_reports(reports)
    logger.info(f"sweep over {len(unique)} seeds: {result.percentiles}")
    if cfg.output_dir:
        with stage("emit"):
            write_json(Path(cfg.output_dir) / SWEEP_FILE, result.to_dict())
    return result


def parse_seeds(text: str) -> list[int]:
    """'0..199' (inclusive range) or '1,2,7'"""
    text = text.strip()
    match = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if match:
        lo, hi = int(match.group(1)), int(match.group(2))
        if hi < lo:
            raise ConfigurationError(f"empty seed range '{text}'")
        return list(range(lo, hi + 1))
    try:
        seeds = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse seeds '{text}'") from None
    if not seeds:
        raise ConfigurationError("seed list is empty")
    return seeds


# ----------------------------------------------------------------------
# Saved models
# ----------------------------------------------------------------------

def load_model(path: str | Path) -> FittedModel:
    data = read_json(path)
    try:
        if MlpModel.is_serialized(data):
            return MlpModel.from_dict(data)
        if LinearModel.is_serialized(data):
            return LinearModel.from_dict(data)
    except (KeyError, TypeError) as e:
        raise DataError(f"{path}: malformed model file ({e})") from None
    raise DataError(f"{path}: not a linear or MLP model file")


def model_features(model: FittedModel) -> list[str]:
    names = list(model.feature_names)
    if not names:
        raise ConfigurationError("model file carries no feature names")
    return names


def evaluate_model_file(
    model_file: str | Path,
    data_path: str,
    seed: int,
    ratio: Optional[float] = None,
    units: Optional[str] = None,
    target: Optional[str] = None,
    clean: bool = False,
) -> EvalReport:
    """Score a saved model on the test side of the seeded split"""
    with stage("ingest"):
        model = load_model(model_file)
    features = model_features(model)
    cfg = build_experiment_config(
        data_path=data_path, seed=seed, ratio=ratio, units=units, target=target,
        clean=clean, features=features,
    )
    records = load_records(cfg)
    with stage("split"):
        ds = split(records, cfg.ratio, cfg.seed)
    test_records = take(records, ds.test_indices)
    with stage("evaluate"):
        X, y = select_features(test_records, features, cfg.target)
        predictions = predict_matrix(model, X)
        return evaluate(y, predictions, f"file:{model.descriptor}", cfg.seed)


def to_metric(row: dict[str, float], units: str) -> dict[str, float]:
    """Imperial input rows carry weight in lb and height in inches"""
    if units == "imperial":
        row = dict(row)
        if "weight" in row:
            row["weight"] *= LB_TO_KG
        if "height" in row:
            row["height"] *= IN_TO_CM
    return row


def _row_inputs(name: str, row: dict[str, float]) -> tuple[str, ...]:
    """Raw fields one feature needs from an input row"""
    if name == "bmi" and "bmi" not in row:
        return FORMULA_INPUTS["bmi"]
    return (name,)


def predict_rows(model: FittedModel, rows: Sequence[dict[str, float]]) -> list[float]:
    features = model_features(model)
    missing = sorted({
        field for row in rows for f in features for field in _row_inputs(f, row) if field not in row
    })
    if missing:
        raise ConfigurationError(f"input lacks feature(s): {', '.join(missing)}")
    X = np.array([[_feature_value(row, f) for f in features] for row in rows], dtype=np.float64)
    return [float(v) for v in predict_matrix(model, X)]


def _feature_value(row: dict[str, float], name: str) -> float:
    if name == "bmi" and "bmi" not in row:
        return bmi(row["weight"], row["height"] / 100.0)
    return float(row[name])


FORMULA_INPUTS = {
    "bmi": ("weight", "height"),
    "navy": ("waist", "neck", "height"),
    "siri": ("density",),
}


def predict_formula(formula: str, row: dict[str, float], clamp: bool = False) -> float:
    """Closed-form estimate from one input row (weight kg, lengths cm)"""
    if formula not in FORMULA_INPUTS:
        raise ConfigurationError(f"unknown formula '{formula}', expected one of {', '.join(FORMULA_INPUTS)}")
    row = dict(row)
    if formula == "navy" and "waist" not in row and "abdomen" in row:
        row["waist"] = row["abdomen"]
    missing = [k for k in FORMULA_INPUTS[formula] if k not in row]
    if missing:
        raise ConfigurationError(f"{formula} needs {', '.join(missing)}")
    if formula == "bmi":
        return bmi(row["weight"], row["height"] / 100.0)
    if formula == "navy":
        return navy_bf_male(row["waist"], row["neck"], row["height"], clamp=clamp, constants=config.navy)
    return siri_bf(row["density"], clamp=clamp)
