"""Training loops, optimizers, evaluation metrics, sweeps and run directories."""

from .config import (
    DESK_RUN_CONFIG,
    DataConfig,
    OptimizerConfig,
    PolicyConfig,
    RunConfig,
    TrainingConfig,
    apply_overrides,
    load_config,
    save_config,
    with_fixed_f,
)
from .evaluation import EvaluationResult, EvaluationSummary, evaluate, perplexity, summarize_records
from .optimizers import OptimizerState, optimizer_step
from .rundir import RunSummary, read_summary, write_run_dir
from .runner import load_corpora, resolve_reference, run_experiment
from .sweep import SweepReport, TrendStatistics, sweep, sweep_settings, trend_of
from .training import RunArtifacts, SftRun, build_policy, fit_sft, train_po, train_sft

__all__ = [
    "RunConfig",
    "DataConfig",
    "PolicyConfig",
    "OptimizerConfig",
    "TrainingConfig",
    "DESK_RUN_CONFIG",
    "load_config",
    "apply_overrides",
    "save_config",
    "with_fixed_f",
    "OptimizerState",
    "optimizer_step",
    "build_policy",
    "fit_sft",
    "train_sft",
    "train_po",
    "SftRun",
    "RunArtifacts",
    "evaluate",
    "perplexity",
    "summarize_records",
    "EvaluationResult",
    "EvaluationSummary",
    "RunSummary",
    "read_summary",
    "write_run_dir",
    "load_corpora",
    "resolve_reference",
    "run_experiment",
    "sweep",
    "sweep_settings",
    "trend_of",
    "SweepReport",
    "TrendStatistics",
]
