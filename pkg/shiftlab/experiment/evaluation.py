"""Held-out metrics: per-record log-probabilities, reward margins, accuracy and perplexity."""

import logging
import math
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..core.errors import DomainError
from ..core.parallel import parallel_map
from ..core.scalars import sigmoid_array
from ..core.types import PreferenceTriple
from ..diagnostics.targets import AnyPolicy

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["id", "logp_w", "logp_l", "margin"]


class EvaluationSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    record_count: int
    omega1: float  # mean log pi(y_w|x)
    mean_logp_rejected: float
    omega2_hard: float
    omega2_smooth: float
    reward_accuracy: float  # equals omega2_hard; ties count as incorrect
    mean_margin: float  # beta-scaled


class EvaluationResult:
    """Per-record table plus its summary."""

    __slots__ = ("records", "summary")

    def __init__(self, records: pd.DataFrame, summary: EvaluationSummary):
        self.records = records
        self.summary = summary


def summarize_records(records: pd.DataFrame, beta: float, gamma: float) -> EvaluationSummary:
    """Summary statistics recomputed from an ``eval_records`` table."""
    if records.empty:
        raise DomainError("cannot summarize an empty evaluation table", value=0)
    margin = records["margin"].to_numpy(dtype=np.float64)
    accuracy = float(np.mean(margin > 0))
    return EvaluationSummary(
        record_count=len(records),
        omega1=float(np.mean(records["logp_w"].to_numpy(dtype=np.float64))),
        mean_logp_rejected=float(np.mean(records["logp_l"].to_numpy(dtype=np.float64))),
        omega2_hard=accuracy,
        omega2_smooth=float(np.mean(sigmoid_array(gamma * (margin / beta)))),
        reward_accuracy=accuracy,
        mean_margin=float(np.mean(margin)),
    )


def evaluate(
    policy: AnyPolicy,
    ref: AnyPolicy,
    testset: Sequence[PreferenceTriple],
    beta: float,
    gamma: float,
    workers: Optional[int] = None,
) -> EvaluationResult:
    """
    Score every test record under the policy and the reference.

    The margin column is beta * (chosen_logratio - rejected_logratio), the
    implicit reward difference.

    Raises:
        DomainError: If the test set is empty or beta / gamma is not positive
    """
    if len(testset) == 0:
        raise DomainError("test set must contain at least one record", value=0)
    if not beta > 0 or not gamma > 0:
        raise DomainError(f"beta and gamma must be positive, got beta={beta}, gamma={gamma}")

    def score(record: PreferenceTriple):
        x = record.prompt.tokens
        logp_w = policy.logprob(x, record.chosen.tokens)
        logp_l = policy.logprob(x, record.rejected.tokens)
        chosen = logp_w - ref.logprob(x, record.chosen.tokens)
        rejected = logp_l - ref.logprob(x, record.rejected.tokens)
        return record.id, logp_w, logp_l, beta * (chosen - rejected)

    rows = parallel_map(score, testset, workers)
    records = pd.DataFrame(rows, columns=RECORD_COLUMNS)
    records["id"] = records["id"].astype(np.int64)
    return EvaluationResult(records, summarize_records(records, beta, gamma))


def perplexity(policy: AnyPolicy, testset: Sequence[PreferenceTriple], workers: Optional[int] = None) -> float:
    """exp of the negative mean per-token log-probability of the chosen responses."""
    if len(testset) == 0:
        raise DomainError("perplexity needs at least one record", value=0)
    sums = parallel_map(lambda r: float(np.sum(policy.token_logprobs(r.prompt.tokens, r.chosen.tokens))), testset, workers)
    tokens = sum(r.chosen.length for r in testset)
    if tokens == 0:
        raise DomainError("perplexity needs at least one chosen token", value=0)
    return math.exp(-math.fsum(sums) / tokens)
