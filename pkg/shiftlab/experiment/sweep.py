"""
Ablation sweeps over the shift coefficient.

All settings share the seed, the data and one SFT reference; each gets its
own run directory. A failing setting is recorded and the sweep moves on.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from scipy.stats import spearmanr

from ..core.errors import DomainError, ShiftLabError
from ..core.parallel import parallel_map
from ..objectives.schedule import ScheduleSpec
from .config import RunConfig
from .rundir import SWEEP_SUMMARY_FILE, RunSummary, write_table
from .runner import load_corpora, resolve_reference, run_experiment

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "f",
    "omega1",
    "reward_accuracy",
    "mean_margin",
    "perplexity",
    "label",
    "objective_kind",
    "strategy",
    "lambda_max",
    "alpha",
    "status",
]

# f grid of the fixed-strategy ablation, plus the fine-grained values just below 1
DEFAULT_F_VALUES = (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0)
NEAR_ONE_F_VALUES = (0.96, 0.97, 0.98, 0.99)
DEFAULT_LINEAR_LAMBDA_MINS = (0.75, 0.85, 0.95)


def extend_near_one(f_values: Sequence[float]) -> List[float]:
    """``f_values`` followed by the near-one values it does not already hold."""
    return [*f_values, *(f for f in NEAR_ONE_F_VALUES if f not in f_values)]


class TrendStatistics(BaseModel):
    model_config = ConfigDict(frozen=True)

    count: int
    rho_accuracy: float  # Spearman rho(f, reward accuracy)
    rho_omega1: float  # Spearman rho(f, omega1)


class SweepReport:
    """Per-setting summaries, failures and the cross-run table."""

    __slots__ = ("runs", "failures", "table")

    def __init__(self, runs: Dict[str, RunSummary], failures: Dict[str, str], table: pd.DataFrame):
        self.runs = runs
        self.failures = failures
        self.table = table

    def trend(self) -> TrendStatistics:
        """Rank correlations over the successful fixed-strategy DPO-Shift runs."""
        return trend_of(self.table)

    def __repr__(self) -> str:
        return f"SweepReport(runs={len(self.runs)}, failures={len(self.failures)})"


def trend_of(table: pd.DataFrame) -> TrendStatistics:
    rows = table[(table["strategy"] == "fixed") & (table["objective_kind"] == "dpo_shift") & (table["status"] == "ok")]
    if len(rows) < 2:
        return TrendStatistics(count=len(rows), rho_accuracy=math.nan, rho_omega1=math.nan)
    f = rows["f"].to_numpy(dtype=np.float64)
    rho_accuracy, _ = spearmanr(f, rows["reward_accuracy"].to_numpy(dtype=np.float64))
    rho_omega1, _ = spearmanr(f, rows["omega1"].to_numpy(dtype=np.float64))
    return TrendStatistics(count=len(rows), rho_accuracy=float(rho_accuracy), rho_omega1=float(rho_omega1))


def sweep_settings(
    base_config: RunConfig,
    f_values: Sequence[float],
    variants: Sequence[ScheduleSpec] = (),
    alpha_values: Sequence[float] = (),
) -> List[Tuple[str, RunConfig]]:
    """
    One (label, config) per fixed f, per schedule variant and per alpha-DPO weight.

    Raises:
        DomainError: If two settings end up with the same label
    """
    settings: List[Tuple[str, RunConfig]] = []
    shift = base_config.objective.model_copy(update={"objective_kind": "dpo_shift"})
    for f in f_values:
        schedule = ScheduleSpec.fixed(f)
        settings.append((schedule.label, base_config.model_copy(update={"schedule": schedule, "objective": shift})))
    for schedule in variants:
        settings.append((schedule.label, base_config.model_copy(update={"schedule": schedule, "objective": shift})))
    for alpha in alpha_values:
        objective = base_config.objective.model_copy(update={"objective_kind": "alpha_dpo", "alpha": alpha})
        settings.append(
            (f"alpha_dpo_{alpha:g}", base_config.model_copy(update={"schedule": ScheduleSpec(), "objective": objective}))
        )
    labels = [label for label, _ in settings]
    if len(set(labels)) != len(labels):
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        raise DomainError(f"duplicate sweep settings: {duplicates}", value=duplicates)
    return settings


def _row(label: str, config: RunConfig, summary: Optional[RunSummary], status: str) -> dict:
    schedule = config.schedule
    row = {
        "f": schedule.lambda_min,
        "omega1": math.nan,
        "reward_accuracy": math.nan,
        "mean_margin": math.nan,
        "perplexity": math.nan,
        "label": label,
        "objective_kind": config.objective.objective_kind,
        "strategy": schedule.strategy,
        "lambda_max": schedule.lambda_max,
        "alpha": config.objective.alpha,
        "status": status,
    }
    if summary is not None:
        row.update(
            omega1=summary.omega1,
            reward_accuracy=summary.reward_accuracy,
            mean_margin=summary.mean_margin,
            perplexity=summary.perplexity,
        )
    return row


def sweep(
    base_config: RunConfig,
    f_values: Sequence[float],
    variants: Sequence[ScheduleSpec] = (),
    alpha_values: Sequence[float] = (),
    out_dir: Union[str, Path, None] = None,
    workers: Optional[int] = None,
) -> SweepReport:
    """
    Run every setting from one shared SFT reference.

    Args:
        base_config: Configuration every setting starts from
        f_values: Fixed shift coefficients
        variants: Additional schedules, e.g. linear_increase / linear_decrease
        alpha_values: alpha-DPO weights to compare against
        out_dir: Sweep directory; ``base_config.output_dir`` when omitted
        workers: Concurrent runs; settings share no mutable state

    Returns:
        SweepReport whose table is also written to ``sweep_summary.csv``
    """
    out_dir = Path(out_dir or base_config.output_dir)
    settings = sweep_settings(base_config, f_values, variants, alpha_values)
    corpora = load_corpora(base_config)
    ref, checkpoint = resolve_reference(base_config, corpora[0], out_dir)
    logger.info(f"Sweeping {len(settings)} settings into {out_dir}")

    def run_one(item: Tuple[str, RunConfig]) -> Tuple[str, Optional[RunSummary], str]:
        label, config = item
        try:
            _, summary = run_experiment(config, out_dir / label, ref=ref, corpora=corpora, reference_checkpoint=checkpoint)
            return label, summary, "ok"
        except ShiftLabError as e:
            logger.warning(f"Sweep setting {label} failed: {e}")
            return label, None, f"failed: {type(e).__name__}"

    outcomes = parallel_map(run_one, settings, workers)
    runs: Dict[str, RunSummary] = {}
    failures: Dict[str, str] = {}
    rows = []
    for (label, config), (_, summary, status) in zip(settings, outcomes):
        if summary is None:
            failures[label] = status
        else:
            runs[label] = summary
        rows.append(_row(label, config, summary, status))
    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    write_table(out_dir / SWEEP_SUMMARY_FILE, table)
    report = SweepReport(runs, failures, table)
    trend = report.trend()
    logger.info(
        f"Sweep done: {len(runs)} ok, {len(failures)} failed; "
        f"rho(f, accuracy)={trend.rho_accuracy:.3f}, rho(f, omega1)={trend.rho_omega1:.3f}"
    )
    return report
