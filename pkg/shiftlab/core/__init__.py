"""Domain types, settings, scalar math and validation shared by all modules."""

from .dataset_io import read_dataset, write_dataset
from .errors import DataIOError, DomainError, NumericError, PolicyCollapseError, ShiftLabError, UsageError
from .scalars import neg_log_sigmoid, sigmoid_slope, stable_sigmoid
from .seeding import derive_rng
from .settings import (
    DiagnosticsConfig,
    ObjectiveConfig,
    ReportConfig,
    RuntimeConfig,
    Settings,
    get_settings,
    reset_settings,
    update_settings,
)
from .types import PreferenceTriple, TokenSeq, ValidationReport, Violation
from .validation import validate_dataset

__all__ = [
    "TokenSeq",
    "PreferenceTriple",
    "ValidationReport",
    "Violation",
    "ObjectiveConfig",
    "DiagnosticsConfig",
    "ReportConfig",
    "RuntimeConfig",
    "Settings",
    "get_settings",
    "update_settings",
    "reset_settings",
    "stable_sigmoid",
    "neg_log_sigmoid",
    "sigmoid_slope",
    "validate_dataset",
    "read_dataset",
    "write_dataset",
    "derive_rng",
    "ShiftLabError",
    "DomainError",
    "NumericError",
    "PolicyCollapseError",
    "DataIOError",
    "UsageError",
]
