"""DPO, DPO-Shift and alpha-DPO objectives plus the f(lambda) schedules."""

from .losses import (
    LossBreakdown,
    alpha_dpo_loss,
    dpo_loss,
    dpo_shift_loss,
    loss_and_gradient,
    objective_gradient,
    objective_terms,
    preference_loss,
)
from .schedule import ScheduleSpec, ScheduleStrategy, f_value

__all__ = [
    "ScheduleSpec",
    "ScheduleStrategy",
    "f_value",
    "LossBreakdown",
    "preference_loss",
    "dpo_loss",
    "dpo_shift_loss",
    "alpha_dpo_loss",
    "loss_and_gradient",
    "objective_gradient",
    "objective_terms",
]
