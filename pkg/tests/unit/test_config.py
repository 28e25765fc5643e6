import json
import logging
import math

import pytest

from shiftlab.core.errors import DataIOError, UsageError
from shiftlab.core.settings import get_settings, reset_settings, update_settings
from shiftlab.experiment.config import DESK_RUN_CONFIG, apply_overrides, load_config, save_config, with_fixed_f

logger = logging.getLogger(__name__)


class TestRunConfig:
    def test_desk_defaults(self):
        config = load_config()
        corpus = config.data.corpus
        assert corpus.vocab_size == 64
        assert corpus.response_len == 24
        assert corpus.record_count == 2000
        assert config.data.test_prompts * corpus.pairs_per_prompt == 200
        assert config.policy.backend == "loglinear"
        assert config.policy.feature_dim == 256
        assert config.training.sft_epochs == 40
        assert config.training.po_epochs == 1
        assert config.training.batch_size == 32
        assert config.sft_optimizer.kind == config.po_optimizer.kind == "adam"
        assert config.sft_optimizer.lr == 1e-2
        assert config.po_optimizer.lr == 1e-3
        logger.info("✓ desk-scale defaults are in place")

    def test_desk_sft_can_reach_convergence(self):
        # Adam moves a coordinate by at most about lr per step; the fitted
        # reference logits sit several units away from the uniform start
        config = DESK_RUN_CONFIG
        records = config.data.corpus.record_count
        steps = config.training.sft_epochs * math.ceil(records / config.training.batch_size)
        assert steps * config.sft_optimizer.lr >= 10.0
        assert config.po_optimizer.lr < config.sft_optimizer.lr
        logger.info(f"✓ desk SFT budget: {steps} steps, travel {steps * config.sft_optimizer.lr:.1f}")

    def test_overrides(self):
        config = apply_overrides(
            DESK_RUN_CONFIG,
            [
                "objective.beta=0.2",
                "schedule.lambda_min=0.9",
                "training.shuffle=false",
                "output_dir=runs/x",
                "data.corpus.similarity=0.5",
            ],
        )
        assert config.objective.beta == 0.2
        assert config.schedule.lambda_min == 0.9
        assert config.training.shuffle is False
        assert config.output_dir == "runs/x"
        assert config.data.corpus.similarity == 0.5
        assert DESK_RUN_CONFIG.objective.beta == 0.1

    @pytest.mark.parametrize(
        "override",
        ["objective.gamma=1", "nonsense=1", "objective", "=3", "objective.beta=-1", "schedule.lambda_min=2"],
    )
    def test_bad_overrides(self, override):
        with pytest.raises(UsageError):
            apply_overrides(DESK_RUN_CONFIG, [override])

    def test_save_then_load(self, tmp_path):
        config = apply_overrides(DESK_RUN_CONFIG, ["seed=7", "policy.backend=tabular"])
        save_config(tmp_path / "config.json", config)
        assert load_config(tmp_path / "config.json") == config

    def test_load_errors(self, tmp_path):
        with pytest.raises(DataIOError):
            load_config(tmp_path / "missing.json")
        (tmp_path / "bad.json").write_text("{not json", encoding="utf-8")
        with pytest.raises(UsageError):
            load_config(tmp_path / "bad.json")
        (tmp_path / "unknown.json").write_text(json.dumps({"colour": "blue"}), encoding="utf-8")
        with pytest.raises(UsageError):
            load_config(tmp_path / "unknown.json")

    def test_with_fixed_f(self):
        config = with_fixed_f(DESK_RUN_CONFIG, 0.95)
        assert config.schedule.strategy == "fixed"
        assert config.schedule.lambda_min == 0.95

    def test_sections_follow_settings(self, monkeypatch):
        monkeypatch.setenv("SHIFTLAB_OBJECTIVE__BETA", "0.5")
        monkeypatch.setenv("SHIFTLAB_DIAGNOSTICS__ETA", "0.01")
        reset_settings()
        config = load_config()
        assert config.objective.beta == 0.5
        assert config.diagnostics.eta == 0.01
        assert DESK_RUN_CONFIG.objective.beta == 0.1

        update_settings(gamma=3.0)
        assert load_config().diagnostics.gamma == 3.0
        assert config.objective is not get_settings().objective
        logger.info("✓ SHIFTLAB_ objective and diagnostics settings reach the run config")

    def test_saved_config_ignores_settings(self, tmp_path, monkeypatch):
        save_config(tmp_path / "config.json", DESK_RUN_CONFIG)
        monkeypatch.setenv("SHIFTLAB_OBJECTIVE__BETA", "0.5")
        reset_settings()
        assert load_config(tmp_path / "config.json").objective.beta == 0.1
