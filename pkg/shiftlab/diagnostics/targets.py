"""
Target functions of the one-step analysis.

omega1 is the mean chosen log-likelihood; omega2 is the fraction of records
with a strictly positive log-ratio margin, or its sigmoid-smoothed version.
"""

from typing import Optional, Sequence, Union

import numpy as np

from ..core.errors import DomainError
from ..core.parallel import parallel_map
from ..core.scalars import sigmoid_array
from ..core.types import PreferenceTriple
from ..policy.base import Policy
from ..policy.frozen import FrozenPolicy

AnyPolicy = Union[Policy, FrozenPolicy]


def _require_records(dataset: Sequence[PreferenceTriple]) -> None:
    if len(dataset) == 0:
        raise DomainError("dataset must contain at least one record", value=0)


def chosen_logprobs(policy: AnyPolicy, dataset: Sequence[PreferenceTriple], workers: Optional[int] = None) -> np.ndarray:
    return np.asarray(parallel_map(lambda r: policy.logprob(r.prompt.tokens, r.chosen.tokens), dataset, workers))


def logratio_margins(
    policy: AnyPolicy, ref: AnyPolicy, dataset: Sequence[PreferenceTriple], workers: Optional[int] = None
) -> np.ndarray:
    """chosen_logratio - rejected_logratio per record, without the beta factor."""

    def margin(record: PreferenceTriple) -> float:
        x = record.prompt.tokens
        chosen = policy.logprob(x, record.chosen.tokens) - ref.logprob(x, record.chosen.tokens)
        rejected = policy.logprob(x, record.rejected.tokens) - ref.logprob(x, record.rejected.tokens)
        return chosen - rejected

    return np.asarray(parallel_map(margin, dataset, workers), dtype=np.float64)


def omega1(policy: AnyPolicy, dataset: Sequence[PreferenceTriple], workers: Optional[int] = None) -> float:
    """Mean log pi(y_w|x) over the dataset."""
    _require_records(dataset)
    return float(np.mean(chosen_logprobs(policy, dataset, workers)))


def omega2_hard(
    policy: AnyPolicy, ref: AnyPolicy, dataset: Sequence[PreferenceTriple], workers: Optional[int] = None
) -> float:
    """Fraction of records whose margin is strictly positive; ties count as failures."""
    _require_records(dataset)
    return float(np.mean(logratio_margins(policy, ref, dataset, workers) > 0))


def omega2_smooth(
    policy: AnyPolicy,
    ref: AnyPolicy,
    dataset: Sequence[PreferenceTriple],
    gamma: float,
    workers: Optional[int] = None,
) -> float:
    """Mean sigmoid(gamma * margin)."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}", value=gamma)
    _require_records(dataset)
    return float(np.mean(sigmoid_array(gamma * logratio_margins(policy, ref, dataset, workers))))
