"""The f(lambda) rules mapping the global optimizer step to the shift coefficient."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.errors import DomainError

ScheduleStrategy = Literal["fixed", "linear_increase", "linear_decrease"]


class ScheduleSpec(BaseModel):
    """
    Shift coefficient schedule.

    ``lambda_min`` may exceed 1 to explore the unstable regime, as long as
    ``lambda_max`` is not below it. The fixed strategy only uses ``lambda_min``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    strategy: ScheduleStrategy = "fixed"
    lambda_min: float = Field(default=1.0, gt=0)
    lambda_max: float = Field(default=1.0, gt=0)
    horizon: int = Field(default=1, ge=1)  # T, total preference-optimization steps

    @model_validator(mode="after")
    def _check_order(self) -> "ScheduleSpec":
        if self.lambda_min > self.lambda_max:
            raise ValueError(f"lambda_min ({self.lambda_min}) must not exceed lambda_max ({self.lambda_max})")
        return self

    @classmethod
    def fixed(cls, f: float, horizon: int = 1) -> "ScheduleSpec":
        return cls(strategy="fixed", lambda_min=f, lambda_max=max(1.0, f), horizon=horizon)

    def with_horizon(self, horizon: int) -> "ScheduleSpec":
        return self.model_copy(update={"horizon": max(1, int(horizon))})

    @property
    def label(self) -> str:
        if self.strategy == "fixed":
            return f"fixed_{self.lambda_min:g}"
        return f"{self.strategy}_{self.lambda_min:g}_{self.lambda_max:g}"


def f_value(spec: ScheduleSpec, t: int) -> float:
    """
    Shift coefficient at step t, 0 <= t <= T.

    linear_increase runs from lambda_min at t=0 to lambda_max at t=T,
    linear_decrease the other way round.
    """
    horizon = spec.horizon
    if not 0 <= t <= horizon:
        raise DomainError(f"step {t} outside the schedule horizon [0, {horizon}]", value=t)
    lo, hi = spec.lambda_min, spec.lambda_max
    if spec.strategy == "fixed":
        return lo
    if spec.strategy == "linear_increase":
        if t == horizon:
            return hi
        return t / horizon * (hi - lo) + lo
    if t == horizon:
        return lo
    return t / horizon * (lo - hi) + hi
