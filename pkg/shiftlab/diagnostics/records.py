"""
Per-sample gradient-interaction terms and their sign statistics.

For one record with gradients g_w = grad log pi(y_w|x), g_l = grad log pi(y_l|x):

    c_theta = gamma * sigmoid(f * gamma * r_l - gamma * r_w)
    eta1    = eta * sigmoid(r_l - r_w)
    u1      = c_theta * <g_l, g_w>
    u2      = eta1 * (<g_l, g_w> - |g_l|^2)

``u1_step`` and ``u2_step`` are the same interactions weighted by the
coefficients the training step actually applies (c1 with beta, and the slope
of the smoothed margin target), which predict the measured one-step gaps.
"""

import logging
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.errors import DomainError
from ..core.parallel import parallel_map
from ..core.scalars import sigmoid_slope, stable_sigmoid
from ..core.settings import get_settings
from ..core.types import PreferenceTriple
from ..policy.base import Policy
from .targets import AnyPolicy

logger = logging.getLogger(__name__)

ShiftDirection = Literal["below_one", "above_one"]


class DiagnosticsRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    f: float
    chosen_logratio: float
    rejected_logratio: float
    c_theta: float
    eta1: float
    dot_wl: float
    norm_l_sq: float
    norm_w_sq: float
    u1: float
    u2: float
    c1: float
    margin_slope: float
    u1_step: float
    u2_step: float


class SignStatistics(BaseModel):
    model_config = ConfigDict(frozen=True)

    count: int
    frac_u1_positive: float
    frac_u1_negative: float
    frac_u2_negative: float
    mean_u1: float
    mean_u2: float


class SampleGradients(BaseModel):
    """Log-ratios and exact response gradients of one record."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    chosen_logratio: float
    rejected_logratio: float
    ref_chosen: float
    ref_rejected: float
    grad_chosen: np.ndarray
    grad_rejected: np.ndarray


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}", value=value)


def sample_gradients(triple: PreferenceTriple, policy: Policy, ref: AnyPolicy) -> SampleGradients:
    x = triple.prompt.tokens
    logp_w, grad_w = policy.logprob_and_grad(x, triple.chosen.tokens)
    logp_l, grad_l = policy.logprob_and_grad(x, triple.rejected.tokens)
    ref_w = ref.logprob(x, triple.chosen.tokens)
    ref_l = ref.logprob(x, triple.rejected.tokens)
    return SampleGradients(
        chosen_logratio=logp_w - ref_w,
        rejected_logratio=logp_l - ref_l,
        ref_chosen=ref_w,
        ref_rejected=ref_l,
        grad_chosen=grad_w,
        grad_rejected=grad_l,
    )


def diagnostics_from_gradients(
    record_id: int, grads: SampleGradients, f: float, gamma: float, eta: float, beta: float
) -> DiagnosticsRecord:
    r_w, r_l = grads.chosen_logratio, grads.rejected_logratio
    g_w, g_l = grads.grad_chosen, grads.grad_rejected
    dot_wl = float(g_l @ g_w)
    norm_l_sq = float(g_l @ g_l)
    norm_w_sq = float(g_w @ g_w)
    c_theta = gamma * stable_sigmoid(f * gamma * r_l - gamma * r_w)
    eta1 = eta * stable_sigmoid(r_l - r_w)
    c1 = beta * stable_sigmoid(f * beta * r_l - beta * r_w)
    margin_slope = gamma * sigmoid_slope(gamma * (r_w - r_l))
    return DiagnosticsRecord(
        id=record_id,
        f=f,
        chosen_logratio=r_w,
        rejected_logratio=r_l,
        c_theta=c_theta,
        eta1=eta1,
        dot_wl=dot_wl,
        norm_l_sq=norm_l_sq,
        norm_w_sq=norm_w_sq,
        u1=c_theta * dot_wl,
        u2=eta1 * (dot_wl - norm_l_sq),
        c1=c1,
        margin_slope=margin_slope,
        u1_step=c1 * dot_wl,
        u2_step=c1 * margin_slope * (dot_wl - norm_l_sq),
    )


def sample_diagnostics(
    triple: PreferenceTriple,
    policy: Policy,
    ref: AnyPolicy,
    f: float,
    gamma: float,
    eta: float,
    beta: Optional[float] = None,
) -> DiagnosticsRecord:
    """
    Gradient-interaction terms of one record at the policy's current parameters.

    Args:
        triple: Preference record
        policy: Policy at theta_t
        ref: Reference policy of the log-ratios
        f: Shift coefficient
        gamma: Smoothing factor of the margin target
        eta: Step size entering eta1
        beta: Reward temperature for c1; defaults to the configured objective beta

    Raises:
        DomainError: If f, gamma or eta is not positive
    """
    beta = get_settings().objective.beta if beta is None else beta
    _check_positive(f=f, gamma=gamma, eta=eta, beta=beta)
    return diagnostics_from_gradients(triple.id, sample_gradients(triple, policy, ref), f, gamma, eta, beta)


def dataset_diagnostics(
    policy: Policy,
    ref: AnyPolicy,
    dataset: Sequence[PreferenceTriple],
    f: float,
    gamma: float,
    eta: float,
    beta: Optional[float] = None,
    workers: Optional[int] = None,
) -> List[DiagnosticsRecord]:
    records = parallel_map(lambda t: sample_diagnostics(t, policy, ref, f, gamma, eta, beta), dataset, workers)
    logger.debug(f"Computed diagnostics for {len(records)} records at f={f:g}")
    return records


def sign_statistics(records: Sequence[DiagnosticsRecord], unit_eta1: bool = False) -> SignStatistics:
    """
    Fractions of positive u1 and negative u2 plus their means.

    With ``unit_eta1`` the u2 terms are taken with eta1 set to 1, i.e.
    dot_wl - norm_l_sq; signs and fractions do not change.
    """
    if len(records) == 0:
        raise DomainError("sign statistics need at least one diagnostics record", value=0)
    u1 = np.array([r.u1 for r in records])
    if unit_eta1:
        u2 = np.array([r.dot_wl - r.norm_l_sq for r in records])
    else:
        u2 = np.array([r.u2 for r in records])
    return SignStatistics(
        count=len(records),
        frac_u1_positive=float(np.mean(u1 > 0)),
        frac_u1_negative=float(np.mean(u1 < 0)),
        frac_u2_negative=float(np.mean(u2 < 0)),
        mean_u1=float(np.mean(u1)),
        mean_u2=float(np.mean(u2)),
    )


def recommend_shift_direction(stats: SignStatistics, threshold: float = 0.9) -> ShiftDirection:
    """
    Which side of 1 the shift coefficient should sit on.

    f > 1 is only suggested when at least ``threshold`` of the u1 terms are
    negative; anything short of that keeps f below 1.
    """
    if stats.frac_u1_negative >= threshold:
        return "above_one"
    return "below_one"

