from pathlib import Path
from typing import List

import pytest

from shiftlab.datagen import write_corpus
from shiftlab.experiment.config import DESK_RUN_CONFIG, RunConfig
from shiftlab.experiment.rundir import write_sft_dir
from shiftlab.experiment.runner import load_corpora
from shiftlab.experiment.training import fit_sft
from tests.unit.conftest import TINY_OVERRIDES


def as_set_args(overrides: List[str]) -> List[str]:
    """Turn ``key=value`` overrides into repeated ``--set`` flags"""
    args = []
    for override in overrides:
        args.extend(["--set", override])
    return args


TINY_ARGS = as_set_args(TINY_OVERRIDES)


class DeskReference:
    """Desk-scale corpus files and the SFT reference trained on them"""

    def __init__(self, root: Path, config: RunConfig):
        self.root = root
        self.config = config
        self.data_dir = root / "data"
        self.checkpoint = root / "sft" / "checkpoints" / "sft.ckpt"

    @property
    def args(self) -> List[str]:
        """Flags that point a command at the shared files instead of regenerating them"""
        return as_set_args(
            [
                f"data.train_path={self.data_dir / 'train.jsonl'}",
                f"data.test_path={self.data_dir / 'test.jsonl'}",
                f"policy.reference_checkpoint={self.checkpoint}",
            ]
        )


@pytest.fixture(scope="session")
def desk_reference(tmp_path_factory) -> DeskReference:
    """Generate the s = 0.9 desk corpus and fit the SFT reference once per session"""
    root = tmp_path_factory.mktemp("desk")
    config = DESK_RUN_CONFIG
    reference = DeskReference(root, config)
    train, test = load_corpora(config)
    spec = config.data.corpus
    write_corpus(reference.data_dir, spec.for_split("train", spec.num_prompts), train)
    write_corpus(reference.data_dir, spec.for_split("test", config.data.test_prompts), test)
    write_sft_dir(root / "sft", config, fit_sft(config, train))
    return reference
