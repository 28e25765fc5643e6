import os
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_CURRENT_ENV = os.getenv("ENV", "dev")

ObjectiveKind = Literal["dpo", "dpo_shift", "alpha_dpo"]
LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class ObjectiveConfig(BaseModel):
    """Preference objective selection and its scalar knobs."""

    objective_kind: ObjectiveKind = "dpo_shift"
    beta: float = Field(default=0.1, gt=0)  # reward temperature
    alpha: float = Field(default=0.0, ge=0)  # SFT mixing weight for alpha_dpo, 0 disables


class DiagnosticsConfig(BaseModel):
    """Knobs of the one-step gap analysis."""

    gamma: float = Field(default=1.0, gt=0)  # smoothing factor of the margin indicator
    eta: float = Field(default=1e-3, gt=0)  # plain ascent step used for gap measurement


class ReportConfig(BaseModel):
    """Fixed histogram bin edges used by the report command."""

    bin_count: int = Field(default=20, ge=1)
    logp_range: Tuple[float, float] = (-200.0, 0.0)
    margin_range: Tuple[float, float] = (-2.0, 2.0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "ReportConfig":
        for name in ("logp_range", "margin_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must be increasing, got ({lo}, {hi})")
        return self


class RuntimeConfig(BaseModel):
    log_level: LogLevel = "INFO"
    workers: int = Field(default=1, ge=1)  # >1 turns per-sample maps into a thread pool


class Settings(BaseSettings):
    # Pydantic's internal mechanisms specifically look for a class variable named `model_config`
    # to determine the settings source.
    model_config = SettingsConfigDict(
        env_prefix="SHIFTLAB_",
        env_file=(".env.common", f".env.{_CURRENT_ENV}"),
        env_nested_delimiter="__",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    objective: ObjectiveConfig = ObjectiveConfig()
    diagnostics: DiagnosticsConfig = DiagnosticsConfig()
    report: ReportConfig = ReportConfig()
    runtime: RuntimeConfig = RuntimeConfig()


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def update_settings(
    beta: Optional[float] = None,
    gamma: Optional[float] = None,
    eta: Optional[float] = None,
    workers: Optional[int] = None,
    log_level: Optional[LogLevel] = None,
    **kwargs,
) -> Settings:
    """
    Update global settings with new configuration values.

    Args:
        beta: Reward temperature of the preference objective
        gamma: Smoothing factor for the smoothed margin target
        eta: Step size used by gap measurement
        workers: Thread count for per-sample parallel maps
        log_level: Root log level used by the command line
        **kwargs: Whole sections to replace (e.g. ``report=ReportConfig(...)``)

    Returns:
        Updated Settings instance
    """
    current_settings = get_settings()

    if beta is not None:
        current_settings.objective = current_settings.objective.model_copy(update={"beta": beta})
    if gamma is not None:
        current_settings.diagnostics = current_settings.diagnostics.model_copy(update={"gamma": gamma})
    if eta is not None:
        current_settings.diagnostics = current_settings.diagnostics.model_copy(update={"eta": eta})
    if workers is not None:
        current_settings.runtime = current_settings.runtime.model_copy(update={"workers": workers})
    if log_level is not None:
        current_settings.runtime = current_settings.runtime.model_copy(update={"log_level": log_level})

    for key, value in kwargs.items():
        if hasattr(current_settings, key):
            setattr(current_settings, key, value)

    return current_settings


def reset_settings() -> None:
    """Reset the global settings instance."""
    global _settings
    _settings = None
