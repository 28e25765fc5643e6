"""
Per-sample preference losses and their closed-form gradients.

With chosen/rejected log-ratios r_w = log pi(y_w|x) - log pi_ref(y_w|x) and
r_l likewise, the shifted objective is

    L = -log sigmoid(beta * r_w - f * beta * r_l)

and its gradient is -(c1 * grad log pi(y_w|x) - c2 * grad log pi(y_l|x)) with
c1 = beta * sigmoid(f * beta * r_l - beta * r_w) and c2 = f * c1. DPO is the
f = 1 case and goes through the very same code path.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.errors import DomainError
from ..core.scalars import neg_log_sigmoid, stable_sigmoid
from ..core.settings import ObjectiveKind
from ..core.types import PreferenceTriple
from ..policy.base import Policy
from ..policy.frozen import FrozenPolicy

logger = logging.getLogger(__name__)

Reference = Union[Policy, FrozenPolicy]


class LossBreakdown(BaseModel):
    """One sample's loss together with the terms it was built from."""

    model_config = ConfigDict(frozen=True)

    loss: float
    margin_argument: float  # the value inside the sigmoid
    chosen_logratio: float
    rejected_logratio: float
    f_value: float
    c1: float
    c2: float
    logp_chosen: float
    sft_term: float = 0.0  # -(alpha / |y_w|) * log pi(y_w|x), zero unless alpha > 0
    warning: bool = False  # set when f > 1


@lru_cache(maxsize=None)
def _warn_large_shift(f: float) -> None:
    logger.warning(f"Shift coefficient f={f:g} exceeds 1; training with f > 1 is known to collapse quickly")


def _check_args(beta: float, f: float, alpha: float) -> None:
    if not beta > 0 or not math.isfinite(beta):
        raise DomainError(f"beta must be positive and finite, got {beta}", value=beta)
    if not f > 0 or not math.isfinite(f):
        raise DomainError(f"shift coefficient f must be positive and finite, got {f}", value=f)
    if not alpha >= 0 or not math.isfinite(alpha):
        raise DomainError(f"alpha must be non-negative and finite, got {alpha}", value=alpha)


def _breakdown(
    logp_w: float, logp_l: float, ref_w: float, ref_l: float, n_chosen: int, beta: float, f: float, alpha: float
) -> LossBreakdown:
    chosen_logratio = logp_w - ref_w
    rejected_logratio = logp_l - ref_l
    margin_argument = beta * chosen_logratio - f * beta * rejected_logratio
    c1 = beta * stable_sigmoid(-margin_argument)
    sft_term = 0.0
    if alpha > 0:
        sft_term = -(alpha / n_chosen) * logp_w
    warning = f > 1.0
    if warning:
        _warn_large_shift(f)
    return LossBreakdown(
        loss=neg_log_sigmoid(margin_argument) + sft_term,
        margin_argument=margin_argument,
        chosen_logratio=chosen_logratio,
        rejected_logratio=rejected_logratio,
        f_value=f,
        c1=c1,
        c2=f * c1,
        logp_chosen=logp_w,
        sft_term=sft_term,
        warning=warning,
    )


def _reference_logprobs(triple: PreferenceTriple, ref: Reference) -> Tuple[float, float]:
    x = triple.prompt.tokens
    return ref.logprob(x, triple.chosen.tokens), ref.logprob(x, triple.rejected.tokens)


def preference_loss(
    triple: PreferenceTriple, policy: Policy, ref: Reference, beta: float, f: float = 1.0, alpha: float = 0.0
) -> LossBreakdown:
    """Shifted DPO loss plus the optional length-normalized SFT term."""
    _check_args(beta, f, alpha)
    x = triple.prompt.tokens
    ref_w, ref_l = _reference_logprobs(triple, ref)
    return _breakdown(
        policy.logprob(x, triple.chosen.tokens),
        policy.logprob(x, triple.rejected.tokens),
        ref_w,
        ref_l,
        len(triple.chosen),
        beta,
        f,
        alpha,
    )


def dpo_shift_loss(triple: PreferenceTriple, policy: Policy, ref: Reference, beta: float, f: float) -> LossBreakdown:
    """
    -log sigmoid(beta * r_w - f * beta * r_l).

    Raises:
        DomainError: If beta <= 0 or f <= 0. Values f > 1 only set ``warning``.
    """
    return preference_loss(triple, policy, ref, beta, f=f)


def dpo_loss(triple: PreferenceTriple, policy: Policy, ref: Reference, beta: float) -> LossBreakdown:
    return dpo_shift_loss(triple, policy, ref, beta, f=1.0)


def alpha_dpo_loss(
    triple: PreferenceTriple, policy: Policy, ref: Reference, beta: float, alpha: float
) -> LossBreakdown:
    """DPO loss minus (alpha / |y_w|) * log pi(y_w|x)."""
    return preference_loss(triple, policy, ref, beta, f=1.0, alpha=alpha)


def loss_and_gradient(
    triple: PreferenceTriple, policy: Policy, ref: Reference, beta: float, f: float = 1.0, alpha: float = 0.0
) -> Tuple[LossBreakdown, np.ndarray]:
    """The breakdown of ``preference_loss`` and its exact gradient in one pass."""
    _check_args(beta, f, alpha)
    x = triple.prompt.tokens
    logp_w, grad_w = policy.logprob_and_grad(x, triple.chosen.tokens)
    logp_l, grad_l = policy.logprob_and_grad(x, triple.rejected.tokens)
    ref_w, ref_l = _reference_logprobs(triple, ref)
    breakdown = _breakdown(logp_w, logp_l, ref_w, ref_l, len(triple.chosen), beta, f, alpha)
    grad = -(breakdown.c1 * grad_w - breakdown.c2 * grad_l)
    if alpha > 0:
        grad -= (alpha / len(triple.chosen)) * grad_w
    return breakdown, grad


def objective_gradient(
    triple: PreferenceTriple, policy: Policy, ref: Reference, beta: float, f: float, alpha: float = 0.0
) -> np.ndarray:
    """
    Closed-form gradient of the shifted loss with respect to theta.

    Args:
        triple: Preference record
        policy: Policy being optimized
        ref: Reference policy
        beta: Reward temperature
        f: Shift coefficient; f = 1 gives the DPO gradient
        alpha: Weight of the length-normalized SFT term

    Returns:
        Gradient vector of dimension ``policy.dim``
    """
    return loss_and_gradient(triple, policy, ref, beta, f=f, alpha=alpha)[1]


def objective_terms(kind: ObjectiveKind, f: float, alpha: float) -> Tuple[float, float]:
    """Effective (f, alpha) for an objective kind given the scheduled f and configured alpha."""
    if kind == "dpo":
        return 1.0, 0.0
    if kind == "dpo_shift":
        return f, 0.0
    if kind == "alpha_dpo":
        return 1.0, alpha
    raise DomainError(f"unknown objective kind {kind!r}", value=kind)
