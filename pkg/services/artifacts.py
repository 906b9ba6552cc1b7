"""
Artifact Writer - report JSON, scatter/trace CSV and optional SVG plots

Every file is written atomically (temp file + rename). Floats are emitted
in shortest round-trip form so repeated runs produce identical bytes.
"""
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Optional

import pandas as pd

from errors import ArtifactIOError, DataError
from models.report import EvalReport, TraceEpoch, TrainingTrace

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "bodyfat-bench"


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write via a temp file in the target directory, then rename"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise ArtifactIOError(f"cannot write {path}: {e}") from None
    return path


def write_json(path: str | Path, payload: Any) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ArtifactIOError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise DataError(f"{path} is not valid JSON: {e}") from None


def _frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n", na_rep="")


# ----------------------------------------------------------------------
# Scatter (predicted vs true)
# ----------------------------------------------------------------------

def emit_scatter(report: EvalReport, path: str | Path, svg: bool = False) -> list[Path]:
    """`true,predicted` CSV, plus an SVG sibling when `svg` is set"""
    if not report.pairs:
        raise DataError("report has no (true, predicted) pairs")
    frame = pd.DataFrame(list(report.pairs), columns=["true", "predicted"])
    written = [atomic_write_text(path, _frame_to_csv(frame))]
    if svg:
        written.append(atomic_write_text(Path(path).with_suffix(".svg"), render_scatter_svg(report)))
    return written


def render_scatter_svg(report: EvalReport) -> str:
    """Predicted vs true with the identity line; points grouped under id `points`"""
    from matplotlib import rc_context
    from matplotlib.figure import Figure

    true = [t for t, _ in report.pairs]
    pred = [p for _, p in report.pairs]
    lo = min(min(true), min(pred))
    hi = max(max(true), max(pred))

    with rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig = Figure(figsize=(5, 5))
        ax = fig.subplots()
        ax.plot([lo, hi], [lo, hi], linestyle="--", color="grey", linewidth=1, gid="identity")
        points = ax.scatter(true, pred, s=14, color="#3B82F6")
        points.set_gid("points")
        ax.set_xlabel("True body fat (%)")
        ax.set_ylabel("Predicted body fat (%)")
        ax.set_title(
            f"{report.model_descriptor}  R²={report.r2:.2f}  RMSE={report.rmse:.2f}", fontsize=9
        )
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


# ----------------------------------------------------------------------
# Loss curves
# ----------------------------------------------------------------------

def emit_trace(trace: TrainingTrace, path: str | Path, svg: bool = False) -> list[Path]:
    """`epoch,train_loss,holdout_loss` CSV (holdout empty when unused)"""
    if not len(trace):
        raise DataError("trace has no epochs")
    frame = pd.DataFrame(
        {
            "epoch": [e.epoch for e in trace.epochs],
            "train_loss": [e.train_loss for e in trace.epochs],
            "holdout_loss": [e.holdout_loss for e in trace.epochs],
        }
    )
    written = [atomic_write_text(path, _frame_to_csv(frame))]
    if svg:
        written.append(atomic_write_text(Path(path).with_suffix(".svg"), render_trace_svg(trace)))
    return written


def render_trace_svg(trace: TrainingTrace) -> str:
    from matplotlib import rc_context
    from matplotlib.figure import Figure

    epochs = [e.epoch for e in trace.epochs]
    with rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig = Figure(figsize=(6, 4))
        ax = fig.subplots()
        ax.plot(epochs, trace.train_losses, label="training", gid="train-curve")
        if trace.has_holdout:
            ax.plot(epochs, [e.holdout_loss for e in trace.epochs], label="holdout", gid="holdout-curve")
        if trace.best_epoch is not None:
            ax.axvline(trace.best_epoch, linestyle=":", color="grey", linewidth=1)
        ax.set_xlabel("Epoch")
        ax.set_ylabel("MSE loss")
        ax.legend()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def read_trace_csv(path: str | Path) -> TrainingTrace:
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except OSError as e:
        raise ArtifactIOError(f"cannot read {path}: {e}") from None
    missing = {"epoch", "train_loss", "holdout_loss"} - set(frame.columns)
    if missing:
        raise DataError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
    epochs = tuple(
        TraceEpoch(
            epoch=int(row.epoch),
            train_loss=float(row.train_loss),
            holdout_loss=None if pd.isna(row.holdout_loss) else float(row.holdout_loss),
        )
        for row in frame.itertuples(index=False)
    )
    monitored = [e.monitored_loss for e in epochs]
    best: Optional[int] = monitored.index(min(monitored)) if monitored else None
    return TrainingTrace(epochs=epochs, best_epoch=best)


def read_report(path: str | Path) -> EvalReport:
    try:
        return EvalReport.from_dict(read_json(path))
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"{path} is not an evaluation report: {e}") from None
