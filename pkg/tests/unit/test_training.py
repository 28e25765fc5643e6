"""
Tests for the SFT and preference-optimization loops.

$ pytest tests/unit/test_training.py -v
"""

import logging
import math

import numpy as np
import pandas as pd
import pytest

from shiftlab.core.errors import DomainError, PolicyCollapseError
from shiftlab.core.settings import update_settings
from shiftlab.diagnostics import omega1
from shiftlab.experiment.config import apply_overrides
from shiftlab.experiment.training import (
    HISTORY_COLUMNS,
    METRIC_COLUMNS,
    build_policy,
    collapse_bound,
    fit_sft,
    total_steps,
    train_po,
    train_sft,
)
from shiftlab.objectives import ScheduleSpec, objective_gradient
from shiftlab.policy import TabularPolicy
from tests.unit.conftest import tiny_config, tiny_corpora, tiny_reference

logger = logging.getLogger(__name__)


class TestSft:
    def test_zero_learning_rate(self):
        config = tiny_config("sft_optimizer.lr=0")
        train, _ = tiny_corpora(config)
        for kind in ("sgd", "adam"):
            config = apply_overrides(config, [f"sft_optimizer.kind={kind}"])
            initial = build_policy(config.policy, 8, config.seed)
            policy = train_sft(config, train)
            assert np.array_equal(policy.theta, initial.theta)
        logger.info("✓ zero learning rate leaves parameters bit-exactly unchanged")

    def test_one_sgd_step(self):
        config = tiny_config("sft_optimizer.kind=sgd", "training.sft_epochs=1", "training.batch_size=12")
        train, _ = tiny_corpora(config)
        initial = build_policy(config.policy, 8, config.seed)
        policy = train_sft(config, train)
        grads = [initial.grad_logprob(r.prompt.tokens, r.chosen.tokens) for r in train]
        expected = initial.theta + config.sft_optimizer.lr * np.mean(grads, axis=0)
        assert np.allclose(policy.theta, expected, atol=1e-14)

    def test_loss_recorded_per_step(self):
        config = tiny_config()
        train, _ = tiny_corpora(config)
        sft = fit_sft(config, train)
        assert len(sft.metrics) == total_steps(len(train), 5, 2) == 6
        assert list(sft.metrics["step"]) == list(range(1, 7))
        assert sft.metrics["loss"].iloc[0] == pytest.approx(5 * math.log(8), abs=1e-12)
        assert omega1(sft.policy, train) > -5 * math.log(8)

    def test_tabular_maximum_likelihood(self):
        V = 4
        config = tiny_config(
            "data.corpus.vocab_size=4",
            "data.corpus.num_prompts=20",
            "data.corpus.response_len=6",
            "policy.backend=tabular",
            "policy.prompt_buckets=1",
            "training.batch_size=40",
            "training.sft_epochs=400",
            "training.shuffle=false",
            "training.eval_interval=100",
            "sft_optimizer.lr=0.1",
        )
        train, _ = tiny_corpora(config)
        policy = train_sft(config, train)
        assert isinstance(policy, TabularPolicy)

        counts = {}
        for r in train:
            for i, token in enumerate(r.chosen.tokens):
                row = policy.context_of(r.prompt.tokens, r.chosen.tokens[:i])
                counts.setdefault(row, np.zeros(V))[token] += 1
        for row, c in counts.items():
            empirical = c / c.sum()
            learned = np.exp(policy.next_token_logprobs([0], [] if row == V else [row]))
            assert 0.5 * np.abs(learned - empirical).sum() <= 0.02, f"context {row}"
        logger.info(f"✓ tabular SFT recovers empirical next-token frequencies on {len(counts)} contexts")

    def test_empty_corpus(self):
        with pytest.raises(DomainError):
            fit_sft(tiny_config(), [])


class TestPreferenceOptimization:
    def test_shift_at_one_equals_dpo(self):
        config = tiny_config()
        train, test = tiny_corpora(config)
        ref = tiny_reference()
        shift = train_po(apply_overrides(config, ["objective.objective_kind=dpo_shift"]), train, ref, test)
        dpo = train_po(apply_overrides(config, ["objective.objective_kind=dpo"]), train, ref, test)
        pd.testing.assert_frame_equal(shift.metrics, dpo.metrics, check_exact=True)
        pd.testing.assert_frame_equal(shift.evaluation.records, dpo.evaluation.records, check_exact=True)
        assert np.array_equal(shift.policy.theta, dpo.policy.theta)
        logger.info("✓ DPO-Shift at f = 1 retraces DPO step for step")

    def test_one_sgd_step_full_batch(self):
        config = tiny_config(
            "po_optimizer.kind=sgd", "training.batch_size=12", "training.shuffle=false", "schedule.lambda_min=0.8"
        )
        train, _ = tiny_corpora(config)
        ref = tiny_reference()
        artifacts = train_po(config, train, ref)
        start = ref.thaw()
        grads = [objective_gradient(r, start, ref, config.objective.beta, 0.8) for r in train]
        expected = start.theta - config.po_optimizer.lr * np.mean(grads, axis=0)
        assert artifacts.steps == 1
        assert np.allclose(artifacts.policy.theta, expected, atol=1e-14)
        assert artifacts.metrics["f_value"].tolist() == [0.8]

    def test_deterministic_and_worker_independent(self):
        config = tiny_config("schedule.lambda_min=0.9")
        train, test = tiny_corpora(config)
        ref = tiny_reference()
        first = train_po(config, train, ref, test)
        update_settings(workers=3)
        second = train_po(config, train, ref, test)
        pd.testing.assert_frame_equal(first.metrics, second.metrics, check_exact=True)
        pd.testing.assert_frame_equal(first.evaluation.records, second.evaluation.records, check_exact=True)

    def test_reference_untouched(self):
        config = tiny_config()
        train, test = tiny_corpora(config)
        ref = tiny_reference()
        before = [ref.logprob(r.prompt.tokens, r.chosen.tokens) for r in test]
        train_po(config, train, ref, test)
        assert [ref.logprob(r.prompt.tokens, r.chosen.tokens) for r in test] == before

    def test_schedule_and_history(self):
        config = tiny_config("schedule.strategy=linear_increase", "schedule.lambda_min=0.75")
        train, test = tiny_corpora(config)
        artifacts = train_po(config, train, tiny_reference(), test)
        horizon = total_steps(len(train), 5, 1)
        assert artifacts.steps == horizon == 3
        assert list(artifacts.metrics.columns) == METRIC_COLUMNS
        assert artifacts.metrics["f_value"].iloc[0] == 0.75
        assert artifacts.metrics["f_value"].is_monotonic_increasing
        assert list(artifacts.eval_history.columns) == HISTORY_COLUMNS
        assert list(artifacts.eval_history["step"]) == [0, 2, 3]
        assert len(artifacts.diagnostics) == len(test)
        assert artifacts.perplexity >= 1.0
        assert set(artifacts.evaluation.records["id"]) <= {r.id for r in test}

    def test_collapse_detection(self):
        config = tiny_config("training.collapse_bound=0.0")
        train, _ = tiny_corpora(config)
        with pytest.raises(PolicyCollapseError) as e:
            train_po(config, train, tiny_reference())
        assert e.value.step == 1
        assert e.value.bound == 0.0

    def test_default_collapse_bound(self):
        assert collapse_bound(tiny_config(), 64) == pytest.approx(-2 * math.log(64))

    def test_alpha_dpo_differs(self):
        config = tiny_config("objective.objective_kind=alpha_dpo", "objective.alpha=0.5")
        train, _ = tiny_corpora(config)
        ref = tiny_reference()
        mixed = train_po(config, train, ref)
        plain = train_po(apply_overrides(config, ["objective.objective_kind=dpo"]), train, ref)
        assert (mixed.metrics["loss"] > plain.metrics["loss"]).all()
        assert (mixed.metrics["f_value"] == 1.0).all()

    def test_empty_corpus(self):
        with pytest.raises(DomainError):
            train_po(tiny_config(), [], tiny_reference())

    def test_total_steps(self):
        assert total_steps(2000, 32, 1) == 63
        assert total_steps(10, 5, 3) == 6

    def test_fixed_schedule_spec(self):
        config = tiny_config().model_copy(update={"schedule": ScheduleSpec.fixed(0.55)})
        train, _ = tiny_corpora(config)
        artifacts = train_po(config, train, tiny_reference())
        assert (artifacts.metrics["f_value"] == 0.55).all()
