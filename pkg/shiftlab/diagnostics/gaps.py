"""
Empirical one-step gaps between DPO-Shift and DPO.

For every record, one plain ascent step of size eta is taken from theta_t with
that record's own gradient under both objectives. The record's chosen
log-likelihood and smoothed margin indicator are compared between the two new
parameter vectors; the log-likelihood differences are accumulated position by
position from the logit change, never as the difference of two full-sequence
log-probabilities. Averaging gives the measured gaps g1 and g2, which agree
with (1 - f) * eta * mean(u_step) up to O(eta^2).
"""

import logging
import math
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.errors import DomainError, NumericError
from ..core.parallel import parallel_map
from ..core.scalars import sigmoid_difference, stable_sigmoid
from ..core.types import PreferenceTriple
from ..policy.base import Policy
from ..policy.loglinear import LogLinearPolicy
from ..policy.params import LogLinearLayout, PolicyParams
from ..policy.tabular import TabularPolicy
from .records import DiagnosticsRecord, diagnostics_from_gradients, sample_gradients
from .targets import AnyPolicy

logger = logging.getLogger(__name__)

CoefficientMode = Literal["shared", "independent"]


class GapReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    f: float
    eta: float
    gamma: float
    beta: float
    coefficients: CoefficientMode
    record_count: int
    g1_measured: float
    g2_measured: float
    g2_hard_measured: float
    g1_predicted: float
    g2_predicted: float
    residual1: float
    residual2: float


class GapOrder(BaseModel):
    """Log-log slopes of the residuals against eta; about 2 for a first-order law."""

    model_config = ConfigDict(frozen=True)

    f: float
    etas: Tuple[float, ...]
    slope1: float
    slope2: float


def _as_policy(theta_t: Union[Policy, PolicyParams]) -> Policy:
    if isinstance(theta_t, Policy):
        return theta_t
    if isinstance(theta_t.layout, LogLinearLayout):
        return LogLinearPolicy(theta_t)
    return TabularPolicy(theta_t)


def _record_gaps(
    triple: PreferenceTriple,
    policy: Policy,
    ref: AnyPolicy,
    beta: float,
    f: float,
    gamma: float,
    eta: float,
    coefficients: CoefficientMode,
) -> Tuple[float, float, float, DiagnosticsRecord]:
    grads = sample_gradients(triple, policy, ref)
    record = diagnostics_from_gradients(triple.id, grads, f, gamma, eta, beta)
    g_w, g_l = grads.grad_chosen, grads.grad_rejected

    c1 = record.c1
    if coefficients == "shared":
        dpo_c1 = c1
    else:
        dpo_c1 = beta * stable_sigmoid(beta * grads.rejected_logratio - beta * grads.chosen_logratio)
    dpo_direction = dpo_c1 * g_w - dpo_c1 * g_l
    # shift step minus DPO step; exactly zero at f = 1 with shared coefficients
    gap_direction = (c1 - dpo_c1) * g_w - (f * c1 - dpo_c1) * g_l

    plain = policy.theta + eta * dpo_direction
    shifted = plain + eta * gap_direction
    if not (np.all(np.isfinite(shifted)) and np.all(np.isfinite(plain))):
        raise NumericError(f"one-step update of record {triple.id} produced non-finite parameters", eta=eta)

    x, y_w, y_l = triple.prompt.tokens, triple.chosen.tokens, triple.rejected.tokens
    stepped = policy.with_theta(plain)
    step = eta * gap_direction
    # position-wise log-prob changes between the two stepped policies
    chosen_gap = math.fsum(stepped.token_logprob_deltas(x, y_w, step))
    rejected_gap = math.fsum(stepped.token_logprob_deltas(x, y_l, step))
    margin_plain = (stepped.logprob(x, y_w) - grads.ref_chosen) - (stepped.logprob(x, y_l) - grads.ref_rejected)
    margin_gap = chosen_gap - rejected_gap
    smooth_gap = sigmoid_difference(gamma * margin_plain, gamma * margin_gap)
    hard_gap = float(margin_plain + margin_gap > 0) - float(margin_plain > 0)
    return chosen_gap, smooth_gap, hard_gap, record


def measure_gaps_detailed(
    theta_t: Union[Policy, PolicyParams],
    ref: AnyPolicy,
    dataset: Sequence[PreferenceTriple],
    beta: float,
    f: float,
    gamma: float,
    eta: float,
    coefficients: CoefficientMode = "shared",
    workers: Optional[int] = None,
) -> Tuple[GapReport, List[DiagnosticsRecord]]:
    """
    Measure g1 (chosen log-likelihood) and g2 (smoothed margin) after one step.

    Args:
        theta_t: Current policy, or bare parameters of a tabular / log-linear policy
        ref: Reference policy of the log-ratios
        dataset: Records used both for stepping and for the predictions
        beta: Reward temperature of the objective being stepped
        f: Shift coefficient of the DPO-Shift branch
        gamma: Smoothing factor of the margin target
        eta: Plain gradient-ascent step size
        coefficients: "shared" reuses the shift branch's c1 for the DPO branch,
            "independent" uses the DPO branch's own coefficient

    Returns:
        The gap report and the per-record diagnostics its predictions average

    Raises:
        DomainError: For an empty dataset or non-positive beta, f, gamma, eta
        NumericError: If a stepped parameter vector is not finite
    """
    if len(dataset) == 0:
        raise DomainError("gap measurement needs at least one record", value=0)
    for name, value in (("beta", beta), ("f", f), ("gamma", gamma), ("eta", eta)):
        if not value > 0 or not math.isfinite(value):
            raise DomainError(f"{name} must be positive and finite, got {value}", value=value)
    if coefficients not in ("shared", "independent"):
        raise DomainError(f"unknown coefficient mode {coefficients!r}", value=coefficients)

    policy = _as_policy(theta_t)
    per_record = parallel_map(
        lambda t: _record_gaps(t, policy, ref, beta, f, gamma, eta, coefficients), dataset, workers
    )
    g1 = float(np.mean([r[0] for r in per_record]))
    g2 = float(np.mean([r[1] for r in per_record]))
    g2_hard = float(np.mean([r[2] for r in per_record]))
    records = [r[3] for r in per_record]
    g1_pred = (1.0 - f) * eta * float(np.mean([r.u1_step for r in records]))
    g2_pred = (1.0 - f) * eta * float(np.mean([r.u2_step for r in records]))

    report = GapReport(
        f=f,
        eta=eta,
        gamma=gamma,
        beta=beta,
        coefficients=coefficients,
        record_count=len(records),
        g1_measured=g1,
        g2_measured=g2,
        g2_hard_measured=g2_hard,
        g1_predicted=g1_pred,
        g2_predicted=g2_pred,
        residual1=abs(g1 - g1_pred),
        residual2=abs(g2 - g2_pred),
    )
    logger.info(
        f"Gaps at f={f:g}, eta={eta:g}: g1={g1:.3e} (pred {g1_pred:.3e}), g2={g2:.3e} (pred {g2_pred:.3e})"
    )
    return report, records


def measure_gaps(
    theta_t: Union[Policy, PolicyParams],
    ref: AnyPolicy,
    dataset: Sequence[PreferenceTriple],
    beta: float,
    f: float,
    gamma: float,
    eta: float,
    coefficients: CoefficientMode = "shared",
    workers: Optional[int] = None,
) -> GapReport:
    return measure_gaps_detailed(theta_t, ref, dataset, beta, f, gamma, eta, coefficients, workers)[0]


def _slope(etas: np.ndarray, residuals: np.ndarray) -> float:
    keep = residuals > 0
    if np.count_nonzero(keep) < 2 or len(np.unique(etas[keep])) < 2:
        return float("nan")
    return float(np.polyfit(np.log(etas[keep]), np.log(residuals[keep]), 1)[0])


def gap_order(reports: Sequence[GapReport]) -> GapOrder:
    """
    Fit residual ~ eta^p for a single f across an eta grid.

    Zero residuals are skipped; the slope is NaN when fewer than two distinct
    etas remain.
    """
    if len(reports) == 0:
        raise DomainError("gap_order needs at least one report", value=0)
    fs = {r.f for r in reports}
    if len(fs) != 1:
        raise DomainError(f"gap_order expects reports of a single f, got {sorted(fs)}", value=sorted(fs))
    etas = np.array([r.eta for r in reports])
    return GapOrder(
        f=reports[0].f,
        etas=tuple(float(e) for e in etas),
        slope1=_slope(etas, np.array([r.residual1 for r in reports])),
        slope2=_slope(etas, np.array([r.residual2 for r in reports])),
    )
