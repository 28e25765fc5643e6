from typing import Dict, Sequence, Tuple

import numpy as np
import pytest

from shiftlab.core.seeding import derive_rng
from shiftlab.core.types import PreferenceTriple
from shiftlab.datagen import generate_corpus
from shiftlab.experiment.config import RunConfig, apply_overrides
from shiftlab.policy.frozen import FrozenPolicy
from shiftlab.policy.loglinear import LogLinearPolicy


class TablePolicy:
    """Stand-in policy whose log-probabilities are looked up by (prompt, response)"""

    def __init__(self, values: Dict[Tuple[tuple, tuple], float]):
        self.values = values

    def logprob(self, x: Sequence[int], y: Sequence[int]) -> float:
        return self.values[(tuple(x), tuple(y))]


def random_tokens(rng: np.random.Generator, vocab_size: int, length: int) -> Tuple[int, ...]:
    return tuple(int(t) for t in rng.integers(0, vocab_size, size=length))


def random_triple(
    rng: np.random.Generator, vocab_size: int, record_id: int = 0, prompt_len: int = 3, response_len: int = 5
) -> PreferenceTriple:
    return PreferenceTriple.build(
        record_id,
        random_tokens(rng, vocab_size, prompt_len),
        random_tokens(rng, vocab_size, response_len),
        random_tokens(rng, vocab_size, response_len),
    )


def random_dataset(seed: int, count: int, vocab_size: int = 8, response_len: int = 5):
    rng = derive_rng(seed, "dataset")
    return [random_triple(rng, vocab_size, i, response_len=response_len) for i in range(count)]


def margin_stub(margins: Sequence[float]):
    """Records, policy and reference whose log-ratio margins are exactly ``margins``"""
    records = []
    values = {}
    ref_values = {}
    for i, m in enumerate(margins):
        record = PreferenceTriple.build(i, [i], [0], [1])
        records.append(record)
        values[((i,), (0,))] = float(m)
        values[((i,), (1,))] = 0.0
        ref_values[((i,), (0,))] = 0.0
        ref_values[((i,), (1,))] = 0.0
    return records, TablePolicy(values), TablePolicy(ref_values)


# a few seconds end to end: 12 train records, 6 test records, V=8
TINY_OVERRIDES = [
    "data.corpus.vocab_size=8",
    "data.corpus.num_prompts=6",
    "data.corpus.prompt_len=3",
    "data.corpus.pairs_per_prompt=2",
    "data.corpus.response_len=5",
    "data.test_prompts=3",
    "policy.feature_dim=32",
    "training.batch_size=5",
    "training.sft_epochs=2",
    "training.eval_interval=2",
    "sft_optimizer.lr=0.05",
    "po_optimizer.lr=0.01",
]


def tiny_config(*extra: str) -> RunConfig:
    return apply_overrides(RunConfig(), TINY_OVERRIDES + list(extra))


def tiny_corpora(config: RunConfig):
    spec = config.data.corpus
    train = generate_corpus(spec.for_split("train", spec.num_prompts))
    return train, generate_corpus(spec.for_split("test", config.data.test_prompts))


def tiny_reference(seed: int = 0) -> FrozenPolicy:
    return FrozenPolicy(LogLinearPolicy.create(8, feature_dim=32, rng=derive_rng(seed, "ref"), scale=0.3))


@pytest.fixture
def loglinear_pair():
    """A random log-linear policy (m=16, V=8) and a frozen reference drawn from another seed"""
    policy = LogLinearPolicy.create(8, feature_dim=16, order=1, rng=derive_rng(1, "policy"), scale=0.5)
    ref = FrozenPolicy(LogLinearPolicy.create(8, feature_dim=16, order=1, rng=derive_rng(2, "ref"), scale=0.5))
    return policy, ref


@pytest.fixture
def small_dataset():
    return random_dataset(seed=3, count=20)
