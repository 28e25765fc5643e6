"""
Run configuration: a validated pydantic tree loaded from JSON with dotted overrides.

Usage:
    config = load_config("run.json")
    config = apply_overrides(config, ["objective.beta=0.2", "schedule.lambda_min=0.9"])
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..core.errors import DataIOError, UsageError
from ..core.settings import DiagnosticsConfig, ObjectiveConfig, get_settings
from ..datagen.corpus import DESK_CORPUS_SPEC, DESK_TEST_PROMPTS, CorpusSpec
from ..objectives.schedule import ScheduleSpec

logger = logging.getLogger(__name__)

PolicyBackend = Literal["tabular", "loglinear"]
OptimizerKind = Literal["sgd", "adam"]


class DataConfig(BaseModel):
    """Dataset files, or the spec to generate them from when no paths are given."""

    model_config = ConfigDict(extra="forbid")

    train_path: Optional[str] = None
    test_path: Optional[str] = None
    corpus: CorpusSpec = DESK_CORPUS_SPEC
    test_prompts: int = Field(default=DESK_TEST_PROMPTS, ge=1)


class PolicyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    backend: PolicyBackend = "loglinear"
    order: int = Field(default=1, ge=0, le=3)
    feature_dim: int = Field(default=256, ge=1)  # log-linear only
    prompt_buckets: int = Field(default=4, ge=1)  # tabular only
    init_scale: float = Field(default=0.0, ge=0)
    reference_checkpoint: Optional[str] = None  # SFT checkpoint used as pi_ref by train-po


class OptimizerConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: OptimizerKind = "adam"
    lr: float = Field(default=1e-3, ge=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)


class TrainingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sft_epochs: int = Field(default=40, ge=1)
    po_epochs: int = Field(default=1, ge=1)
    batch_size: int = Field(default=32, ge=1)
    eval_interval: int = Field(default=20, ge=1)  # optimizer steps between evaluation-history rows
    shuffle: bool = True
    collapse_bound: Optional[float] = None  # mean per-token log-prob floor; -2 ln V when unset


class RunConfig(BaseModel):
    """
    Everything needed to reproduce one SFT + preference-optimization run.

    The objective and diagnostics sections default to the process settings
    (SHIFTLAB_OBJECTIVE__*, SHIFTLAB_DIAGNOSTICS__*); a saved config carries its
    own values.
    """

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0)
    output_dir: str = "runs/default"
    data: DataConfig = DataConfig()
    policy: PolicyConfig = PolicyConfig()
    objective: ObjectiveConfig = Field(default_factory=lambda: get_settings().objective.model_copy())
    schedule: ScheduleSpec = ScheduleSpec()
    diagnostics: DiagnosticsConfig = Field(default_factory=lambda: get_settings().diagnostics.model_copy())
    sft_optimizer: OptimizerConfig = OptimizerConfig(lr=1e-2)
    po_optimizer: OptimizerConfig = OptimizerConfig(lr=1e-3)
    training: TrainingConfig = TrainingConfig()


# the built-in defaults, independent of SHIFTLAB_ environment overrides
DESK_RUN_CONFIG = RunConfig(objective=ObjectiveConfig(), diagnostics=DiagnosticsConfig())


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except ValueError:
        return raw


def _validate(body: Dict[str, Any], source: str) -> RunConfig:
    try:
        return RunConfig.model_validate(body)
    except ValidationError as e:
        raise UsageError(f"invalid run configuration from {source}: {e}") from e


def load_config(path: Union[str, Path, None] = None) -> RunConfig:
    """Read a RunConfig from JSON; the desk defaults under the current settings when ``path`` is None."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.is_file():
        raise DataIOError(path, "config file not found")
    try:
        body = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from e
    return _validate(body, str(path))


def apply_overrides(config: RunConfig, overrides: Iterable[str]) -> RunConfig:
    """
    Apply ``dotted.key=value`` overrides and re-validate.

    Values are parsed as JSON when possible (numbers, booleans, null, lists)
    and taken as plain strings otherwise.

    Raises:
        UsageError: For malformed overrides, unknown keys or invalid values
    """
    overrides = list(overrides)
    if not overrides:
        return config
    body = config.model_dump(mode="json")
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise UsageError(f"override {item!r} must look like key=value")
        parts = key.strip().split(".")
        node = body
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                raise UsageError(f"unknown configuration section {key!r}")
            node = node[part]
        if parts[-1] not in node:
            raise UsageError(f"unknown configuration key {key!r}")
        node[parts[-1]] = _parse_value(raw.strip())
        logger.debug(f"Override {key} = {node[parts[-1]]!r}")
    return _validate(body, "overrides")


def with_fixed_f(config: RunConfig, f: float) -> RunConfig:
    """Shortcut for a fixed schedule at ``f``."""
    return config.model_copy(update={"schedule": ScheduleSpec.fixed(f, horizon=config.schedule.horizon)})


def save_config(path: Union[str, Path], config: RunConfig) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise DataIOError(path, f"cannot write config: {e}") from e

