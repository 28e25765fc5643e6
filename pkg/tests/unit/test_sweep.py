"""
Tests for shift-coefficient sweeps.

$ pytest tests/unit/test_sweep.py -v
"""

import logging
import math

import pandas as pd
import pytest

from shiftlab.core.errors import DomainError
from shiftlab.experiment.config import apply_overrides
from shiftlab.experiment.rundir import SUMMARY_FILE, SWEEP_SUMMARY_FILE
from shiftlab.experiment.runner import load_corpora, resolve_reference, run_experiment
from shiftlab.experiment.sweep import (
    NEAR_ONE_F_VALUES,
    SWEEP_COLUMNS,
    extend_near_one,
    sweep,
    sweep_settings,
    trend_of,
)
from shiftlab.objectives import ScheduleSpec
from tests.unit.conftest import tiny_config

logger = logging.getLogger(__name__)


class TestSweepSettings:
    def test_labels_and_objectives(self):
        variant = ScheduleSpec(strategy="linear_increase", lambda_min=0.75, lambda_max=1.0)
        settings = sweep_settings(tiny_config(), [0.9, 1.0], [variant], [0.5])
        assert [label for label, _ in settings] == ["fixed_0.9", "fixed_1", "linear_increase_0.75_1", "alpha_dpo_0.5"]
        kinds = [config.objective.objective_kind for _, config in settings]
        assert kinds == ["dpo_shift", "dpo_shift", "dpo_shift", "alpha_dpo"]
        assert settings[0][1].schedule.lambda_min == 0.9
        assert settings[3][1].objective.alpha == 0.5

    def test_duplicates_rejected(self):
        with pytest.raises(DomainError) as e:
            sweep_settings(tiny_config(), [0.9, 0.75, 0.9])
        assert e.value.value == ["fixed_0.9"]

    def test_near_one_values_appended_once(self):
        assert extend_near_one([0.55, 0.97]) == [0.55, 0.97, 0.96, 0.98, 0.99]
        assert extend_near_one([]) == list(NEAR_ONE_F_VALUES)
        labels = [label for label, _ in sweep_settings(tiny_config(), extend_near_one([0.9, 0.99]))]
        assert labels == ["fixed_0.9", "fixed_0.99", "fixed_0.96", "fixed_0.97", "fixed_0.98"]


class TestTrend:
    def test_fixed_shift_rows_only(self):
        table = pd.DataFrame(
            {
                "f": [0.5, 0.7, 0.9, 1.0, 0.75, 0.8],
                "omega1": [-10.0, -11.0, -12.0, -13.0, 0.0, 0.0],
                "reward_accuracy": [0.5, 0.6, 0.7, 0.8, 0.0, 1.0],
                "objective_kind": ["dpo_shift"] * 5 + ["dpo_shift"],
                "strategy": ["fixed"] * 4 + ["linear_increase", "fixed"],
                "status": ["ok"] * 5 + ["failed: NumericError"],
            }
        )
        trend = trend_of(table)
        assert trend.count == 4
        assert trend.rho_accuracy == pytest.approx(1.0)
        assert trend.rho_omega1 == pytest.approx(-1.0)

    def test_too_few_rows(self):
        table = pd.DataFrame(
            {"f": [0.9], "omega1": [-1.0], "reward_accuracy": [0.5], "objective_kind": ["dpo_shift"]}
        ).assign(strategy="fixed", status="ok")
        trend = trend_of(table)
        assert trend.count == 1
        assert math.isnan(trend.rho_accuracy) and math.isnan(trend.rho_omega1)


class TestSweep:
    def test_runs_share_reference(self, tmp_path):
        config = tiny_config()
        report = sweep(config, [0.9, 1.0], out_dir=tmp_path)
        assert set(report.runs) == {"fixed_0.9", "fixed_1"}
        assert not report.failures
        assert list(report.table.columns) == SWEEP_COLUMNS
        assert (tmp_path / SWEEP_SUMMARY_FILE).is_file()
        assert all((tmp_path / label / SUMMARY_FILE).is_file() for label in report.runs)
        checkpoints = {summary.reference_checkpoint for summary in report.runs.values()}
        assert len(checkpoints) == 1
        assert report.trend().count == 2

        # the f = 1 setting retraces plain DPO from the same reference
        corpora = load_corpora(config)
        ref, _ = resolve_reference(config, corpora[0])
        dpo = apply_overrides(config, ["objective.objective_kind=dpo"])
        _, summary = run_experiment(dpo, tmp_path / "dpo", ref=ref, corpora=corpora)
        shifted = report.runs["fixed_1"]
        assert shifted.omega1 == summary.omega1
        assert shifted.reward_accuracy == summary.reward_accuracy
        assert shifted.mean_margin == summary.mean_margin
        logger.info("✓ the f = 1 sweep setting matches a plain DPO run")

    def test_failures_recorded(self, tmp_path):
        report = sweep(tiny_config("training.collapse_bound=0.0"), [0.9, 1.0], out_dir=tmp_path)
        assert not report.runs
        assert report.failures == {"fixed_0.9": "failed: PolicyCollapseError", "fixed_1": "failed: PolicyCollapseError"}
        assert report.table["omega1"].isna().all()
        assert report.trend().count == 0
        assert (tmp_path / SWEEP_SUMMARY_FILE).is_file()
