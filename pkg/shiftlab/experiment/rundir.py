"""
Run and sweep directory layout.

Run directory:
    config.json         resolved RunConfig
    metrics.csv         step, loss, f_value, mean_margin
    eval_history.csv    step, mean_logp_w, mean_logp_l, mean_margin, reward_accuracy
    eval_records.csv    id, logp_w, logp_l, margin
    summary.json        RunSummary
    diagnostics.jsonl   one DiagnosticsRecord per test record
    sft_metrics.csv     step, loss (only when SFT ran in this directory)
    checkpoints/        sft.ckpt, final.ckpt

Sweep directory: one run directory per setting plus sweep_summary.csv.
"""

import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Union

import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from ..core.errors import DataIOError
from ..diagnostics.gaps import GapReport
from ..diagnostics.records import DiagnosticsRecord
from ..policy.checkpoint import save_checkpoint
from .config import RunConfig, save_config
from .training import RunArtifacts, SftRun

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CONFIG_FILE = "config.json"
METRICS_FILE = "metrics.csv"
HISTORY_FILE = "eval_history.csv"
RECORDS_FILE = "eval_records.csv"
SUMMARY_FILE = "summary.json"
DIAGNOSTICS_FILE = "diagnostics.jsonl"
GAPS_FILE = "gap_reports.jsonl"
SFT_METRICS_FILE = "sft_metrics.csv"
SWEEP_SUMMARY_FILE = "sweep_summary.csv"
CHECKPOINT_DIR = "checkpoints"
SFT_CHECKPOINT = "sft.ckpt"
FINAL_CHECKPOINT = "final.ckpt"


class RunSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    objective_kind: str
    schedule: str
    beta: float
    alpha: float
    steps: int
    final_f: float
    record_count: int
    omega1: float
    omega2_hard: float
    omega2_smooth: float
    reward_accuracy: float
    mean_margin: float
    mean_logp_rejected: float
    perplexity: float
    reference_omega1: Optional[float] = None
    reference_checkpoint: Optional[str] = None


def build_summary(
    config: RunConfig,
    artifacts: RunArtifacts,
    reference_omega1: Optional[float] = None,
    reference_checkpoint: Optional[str] = None,
) -> RunSummary:
    if artifacts.evaluation is None or artifacts.perplexity is None:
        raise ValueError("a run summary needs a held-out evaluation")
    s = artifacts.evaluation.summary
    return RunSummary(
        objective_kind=config.objective.objective_kind,
        schedule=config.schedule.label,
        beta=config.objective.beta,
        alpha=config.objective.alpha,
        steps=artifacts.steps,
        final_f=artifacts.final_f,
        record_count=s.record_count,
        omega1=s.omega1,
        omega2_hard=s.omega2_hard,
        omega2_smooth=s.omega2_smooth,
        reward_accuracy=s.reward_accuracy,
        mean_margin=s.mean_margin,
        mean_logp_rejected=s.mean_logp_rejected,
        perplexity=artifacts.perplexity,
        reference_omega1=reference_omega1,
        reference_checkpoint=reference_checkpoint,
    )


def write_table(path: PathLike, frame: pd.DataFrame) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise DataIOError(path, f"cannot write table: {e}") from e


def read_table(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataIOError(path, "table not found")
    try:
        return pd.read_csv(path)
    except (OSError, ValueError) as e:
        raise DataIOError(path, f"unreadable table: {e}") from e


def write_jsonl(path: PathLike, models: Iterable[BaseModel]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(f"{m.model_dump_json()}\n" for m in models), encoding="utf-8")
    except OSError as e:
        raise DataIOError(path, f"cannot write {path.name}: {e}") from e


def write_sft_dir(directory: PathLike, config: RunConfig, sft: SftRun) -> Path:
    """Persist config, SFT metrics and the reference checkpoint; returns the checkpoint path."""
    directory = Path(directory)
    save_config(directory / CONFIG_FILE, config)
    write_table(directory / SFT_METRICS_FILE, sft.metrics)
    checkpoint = directory / CHECKPOINT_DIR / SFT_CHECKPOINT
    save_checkpoint(checkpoint, sft.policy)
    return checkpoint


def write_run_dir(directory: PathLike, config: RunConfig, artifacts: RunArtifacts, summary: RunSummary) -> Path:
    directory = Path(directory)
    save_config(directory / CONFIG_FILE, config)
    write_table(directory / METRICS_FILE, artifacts.metrics)
    write_table(directory / HISTORY_FILE, artifacts.eval_history)
    if artifacts.evaluation is not None:
        write_table(directory / RECORDS_FILE, artifacts.evaluation.records)
    write_jsonl(directory / DIAGNOSTICS_FILE, artifacts.diagnostics)
    try:
        (directory / SUMMARY_FILE).write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise DataIOError(directory / SUMMARY_FILE, f"cannot write summary: {e}") from e
    save_checkpoint(directory / CHECKPOINT_DIR / FINAL_CHECKPOINT, artifacts.policy)
    logger.info(f"Run written to {directory}")
    return directory


def write_diagnostics_dir(
    directory: PathLike, records: List[DiagnosticsRecord], reports: List[GapReport], config: Optional[RunConfig] = None
) -> Path:
    directory = Path(directory)
    if config is not None:
        save_config(directory / CONFIG_FILE, config)
    write_jsonl(directory / DIAGNOSTICS_FILE, records)
    write_jsonl(directory / GAPS_FILE, reports)
    return directory


def read_summary(directory: PathLike) -> RunSummary:
    path = Path(directory) / SUMMARY_FILE
    if not path.is_file():
        raise DataIOError(path, "run summary not found")
    try:
        return RunSummary.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (ValueError, ValidationError) as e:
        raise DataIOError(path, f"unreadable run summary: {e}") from e


def read_gap_reports(directory: PathLike) -> List[GapReport]:
    path = Path(directory) / GAPS_FILE
    if not path.is_file():
        raise DataIOError(path, "gap reports not found")
    try:
        return [GapReport.model_validate_json(line) for line in path.read_text(encoding="utf-8").splitlines() if line]
    except ValidationError as e:
        raise DataIOError(path, f"unreadable gap report: {e}") from e
