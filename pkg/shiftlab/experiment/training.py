"""
SFT and preference-optimization loops.

Per-sample losses and gradients are a parallel map; the batch gradient is
summed in record order and applied by a single optimizer, so results do not
depend on the worker count.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..core.errors import DomainError, NumericError, PolicyCollapseError
from ..core.parallel import parallel_map
from ..core.seeding import derive_rng
from ..core.types import PreferenceTriple
from ..diagnostics.records import DiagnosticsRecord, dataset_diagnostics
from ..objectives.losses import LossBreakdown, loss_and_gradient, objective_terms
from ..objectives.schedule import f_value
from ..policy.base import Policy
from ..policy.frozen import FrozenPolicy
from ..policy.loglinear import LogLinearPolicy
from ..policy.tabular import TabularPolicy
from .config import PolicyConfig, RunConfig
from .evaluation import EvaluationResult, evaluate, perplexity
from .optimizers import OptimizerState, optimizer_step

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["step", "loss", "f_value", "mean_margin"]
SFT_METRIC_COLUMNS = ["step", "loss"]
HISTORY_COLUMNS = ["step", "mean_logp_w", "mean_logp_l", "mean_margin", "reward_accuracy"]


class ReferenceCache:
    """Memoizes reference log-probabilities; valid because the reference never changes."""

    __slots__ = ("ref", "_cache")

    def __init__(self, ref: Union[Policy, FrozenPolicy]):
        self.ref = ref
        self._cache: Dict[Tuple[tuple, tuple], float] = {}

    def logprob(self, x: Sequence[int], y: Sequence[int]) -> float:
        key = (tuple(x), tuple(y))
        value = self._cache.get(key)
        if value is None:
            value = self.ref.logprob(key[0], key[1])
            self._cache[key] = value
        return value


class SftRun:
    __slots__ = ("policy", "metrics")

    def __init__(self, policy: Policy, metrics: pd.DataFrame):
        self.policy = policy
        self.metrics = metrics


class RunArtifacts:
    """Everything one preference-optimization run produced."""

    __slots__ = ("policy", "metrics", "eval_history", "evaluation", "perplexity", "diagnostics", "steps", "final_f")

    def __init__(
        self,
        policy: Policy,
        metrics: pd.DataFrame,
        eval_history: pd.DataFrame,
        evaluation: Optional[EvaluationResult],
        perplexity: Optional[float],
        diagnostics: List[DiagnosticsRecord],
        steps: int,
        final_f: float,
    ):
        self.policy = policy
        self.metrics = metrics
        self.eval_history = eval_history
        self.evaluation = evaluation
        self.perplexity = perplexity
        self.diagnostics = diagnostics
        self.steps = steps
        self.final_f = final_f


def build_policy(config: PolicyConfig, vocab_size: int, seed: int) -> Policy:
    """Initial policy; uniform when ``init_scale`` is 0."""
    rng = derive_rng(seed, "init") if config.init_scale > 0 else None
    if config.backend == "tabular":
        if rng is None:
            return TabularPolicy.uniform(vocab_size, order=config.order, prompt_buckets=config.prompt_buckets)
        return TabularPolicy.random(
            vocab_size, rng, order=config.order, prompt_buckets=config.prompt_buckets, scale=config.init_scale
        )
    return LogLinearPolicy.create(
        vocab_size, feature_dim=config.feature_dim, order=config.order, rng=rng, scale=config.init_scale
    )


def _batches(count: int, batch_size: int, seed: int, phase: str, epoch: int, shuffle: bool) -> List[np.ndarray]:
    order = derive_rng(seed, phase, "shuffle", epoch).permutation(count) if shuffle else np.arange(count)
    return [order[i : i + batch_size] for i in range(0, count, batch_size)]


def total_steps(records: int, batch_size: int, epochs: int) -> int:
    return epochs * math.ceil(records / batch_size)


def _ordered_mean(vectors: Sequence[np.ndarray]) -> np.ndarray:
    total = np.zeros_like(vectors[0])
    for v in vectors:
        total += v
    return total / len(vectors)


def fit_sft(config: RunConfig, corpus: Sequence[PreferenceTriple], policy: Optional[Policy] = None) -> SftRun:
    """
    Maximum-likelihood training on the (prompt, chosen) pairs.

    Raises:
        DomainError: If the corpus is empty
        NumericError: If the loss becomes non-finite, naming the step
    """
    if len(corpus) == 0:
        raise DomainError("SFT corpus must contain at least one record", value=0)
    if policy is None:
        policy = build_policy(config.policy, config.data.corpus.vocab_size, config.seed)
    training = config.training
    state = OptimizerState.initial(policy.theta)
    rows = []
    step = 0
    for epoch in range(training.sft_epochs):
        for batch in _batches(len(corpus), training.batch_size, config.seed, "sft", epoch, training.shuffle):
            results = parallel_map(
                lambda i: policy.logprob_and_grad(corpus[i].prompt.tokens, corpus[i].chosen.tokens), batch
            )
            loss = -float(np.mean([logp for logp, _ in results]))
            step += 1
            if not math.isfinite(loss):
                raise NumericError("SFT loss is not finite", step=step)
            state = optimizer_step(state, -_ordered_mean([grad for _, grad in results]), config.sft_optimizer)
            policy = policy.with_theta(state.theta)
            rows.append((step, loss))
            if step % training.eval_interval == 0:
                logger.info(f"SFT step {step}: loss={loss:.4f}")
            else:
                logger.debug(f"SFT step {step}: loss={loss:.4f}")
    logger.info(f"SFT finished after {step} steps, final batch loss {rows[-1][1]:.4f}")
    return SftRun(policy, pd.DataFrame(rows, columns=SFT_METRIC_COLUMNS))


def train_sft(config: RunConfig, corpus: Sequence[PreferenceTriple]) -> Policy:
    return fit_sft(config, corpus).policy


def collapse_bound(config: RunConfig, vocab_size: int) -> float:
    bound = config.training.collapse_bound
    return -2.0 * math.log(vocab_size) if bound is None else bound


def _history_row(step: int, result: EvaluationResult) -> tuple:
    s = result.summary
    return step, s.omega1, s.mean_logp_rejected, s.mean_margin, s.reward_accuracy


def train_po(
    config: RunConfig,
    corpus: Sequence[PreferenceTriple],
    ref: Union[FrozenPolicy, Policy],
    testset: Optional[Sequence[PreferenceTriple]] = None,
) -> RunArtifacts:
    """
    Batched preference optimization of the configured objective, starting from the reference.

    The schedule horizon is rebound to the true number of steps
    T = epochs * ceil(N / batch_size); step t uses f_value(schedule, t).

    Raises:
        DomainError: If the corpus is empty
        NumericError: If the loss or gradient becomes non-finite
        PolicyCollapseError: If the batch mean per-token log-prob of the chosen
            responses falls below the collapse bound
    """
    if len(corpus) == 0:
        raise DomainError("preference corpus must contain at least one record", value=0)
    if not isinstance(ref, FrozenPolicy):
        ref = FrozenPolicy.freeze(ref)
    policy = ref.thaw()
    reference = ReferenceCache(ref)
    training = config.training
    objective = config.objective
    gamma = config.diagnostics.gamma
    horizon = total_steps(len(corpus), training.batch_size, training.po_epochs)
    schedule = config.schedule.with_horizon(horizon)
    bound = collapse_bound(config, policy.vocab_size)
    logger.info(
        f"Preference optimization: {objective.objective_kind}, schedule {schedule.label}, "
        f"beta={objective.beta:g}, {horizon} steps"
    )

    history = []
    if testset:
        history.append(_history_row(0, evaluate(policy, reference, testset, objective.beta, gamma)))

    state = OptimizerState.initial(policy.theta)
    rows = []
    step = 0
    f_eff = 1.0
    for epoch in range(training.po_epochs):
        for batch in _batches(len(corpus), training.batch_size, config.seed, "po", epoch, training.shuffle):
            f_eff, alpha = objective_terms(objective.objective_kind, f_value(schedule, step), objective.alpha)
            results: List[Tuple[LossBreakdown, np.ndarray]] = parallel_map(
                lambda i: loss_and_gradient(corpus[i], policy, reference, objective.beta, f=f_eff, alpha=alpha),
                batch,
            )
            breakdowns = [b for b, _ in results]
            loss = float(np.mean([b.loss for b in breakdowns]))
            step += 1
            if not math.isfinite(loss):
                raise NumericError("preference loss is not finite", step=step)
            chosen_tokens = sum(corpus[i].chosen.length for i in batch)
            mean_token_logprob = math.fsum(b.logp_chosen for b in breakdowns) / chosen_tokens
            if mean_token_logprob < bound:
                raise PolicyCollapseError(mean_token_logprob, bound, step)

            margin = float(np.mean([objective.beta * (b.chosen_logratio - b.rejected_logratio) for b in breakdowns]))
            state = optimizer_step(state, _ordered_mean([g for _, g in results]), config.po_optimizer)
            policy = policy.with_theta(state.theta)
            rows.append((step, loss, f_eff, margin))

            if step % training.eval_interval == 0 or step == horizon:
                logger.info(f"PO step {step}/{horizon}: loss={loss:.4f}, f={f_eff:.4f}, margin={margin:.4f}")
                if testset:
                    history.append(_history_row(step, evaluate(policy, reference, testset, objective.beta, gamma)))
            else:
                logger.debug(f"PO step {step}: loss={loss:.4f}, f={f_eff:.4f}, margin={margin:.4f}")

    evaluation = None
    ppl = None
    diagnostics: List[DiagnosticsRecord] = []
    if testset:
        evaluation = evaluate(policy, reference, testset, objective.beta, gamma)
        ppl = perplexity(policy, testset)
        diagnostics = dataset_diagnostics(
            policy, reference, testset, f_eff, gamma, config.diagnostics.eta, beta=objective.beta
        )
        s = evaluation.summary
        logger.info(
            f"Final: omega1={s.omega1:.4f}, reward_accuracy={s.reward_accuracy:.3f}, "
            f"margin={s.mean_margin:.4f}, perplexity={ppl:.3f}"
        )
    return RunArtifacts(
        policy=policy,
        metrics=pd.DataFrame(rows, columns=METRIC_COLUMNS),
        eval_history=pd.DataFrame(history, columns=HISTORY_COLUMNS),
        evaluation=evaluation,
        perplexity=ppl,
        diagnostics=diagnostics,
        steps=step,
        final_f=f_eff,
    )
