"""Target functions, per-sample gradient interactions and one-step gap measurement."""

from .gaps import CoefficientMode, GapOrder, GapReport, gap_order, measure_gaps, measure_gaps_detailed
from .records import (
    DiagnosticsRecord,
    SignStatistics,
    dataset_diagnostics,
    recommend_shift_direction,
    sample_diagnostics,
    sign_statistics,
)
from .targets import chosen_logprobs, logratio_margins, omega1, omega2_hard, omega2_smooth

__all__ = [
    "omega1",
    "omega2_hard",
    "omega2_smooth",
    "chosen_logprobs",
    "logratio_margins",
    "DiagnosticsRecord",
    "SignStatistics",
    "sample_diagnostics",
    "dataset_diagnostics",
    "sign_statistics",
    "recommend_shift_direction",
    "CoefficientMode",
    "GapReport",
    "GapOrder",
    "measure_gaps",
    "measure_gaps_detailed",
    "gap_order",
]
