"""
Synthetic preference corpora with a controllable chosen/rejected similarity.

Chosen responses are sampled from a fixed random tabular "ground-truth"
policy drawn from the seed. Each rejected token copies the chosen token at
the same position with probability ``similarity`` and is otherwise drawn
uniformly from the vocabulary, so near-duplicate pairs are as common as the
knob asks for.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..core.dataset_io import read_dataset, write_dataset
from ..core.errors import DataIOError, DomainError
from ..core.seeding import derive_rng
from ..core.types import PreferenceTriple
from ..policy.tabular import TabularPolicy

logger = logging.getLogger(__name__)

GROUND_TRUTH_PROMPT_BUCKETS = 4
GROUND_TRUTH_LOGIT_SCALE = 2.0
SPEC_FILE = "corpus_spec.json"

Split = Literal["train", "test"]


class CorpusSpec(BaseModel):
    """Shape, similarity knob and seed of one corpus split."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    vocab_size: int = Field(default=64, ge=2)
    num_prompts: int = Field(default=500, ge=1)
    prompt_len: int = Field(default=8, ge=1)
    pairs_per_prompt: int = Field(default=4, ge=1)
    response_len: int = Field(default=24, ge=1)
    similarity: float = Field(default=0.9, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)
    split: Split = "train"
    gt_temperature: float = Field(default=1.0, gt=0)

    @property
    def record_count(self) -> int:
        return self.num_prompts * self.pairs_per_prompt

    def for_split(self, split: Split, num_prompts: int) -> "CorpusSpec":
        return self.model_copy(update={"split": split, "num_prompts": num_prompts})


DESK_CORPUS_SPEC = CorpusSpec()
DESK_TEST_PROMPTS = 50


def ground_truth_policy(spec: CorpusSpec) -> TabularPolicy:
    """The generating policy of the chosen responses; depends on the seed and shape only."""
    return TabularPolicy.random(
        spec.vocab_size,
        derive_rng(spec.seed, "ground_truth"),
        order=1,
        prompt_buckets=GROUND_TRUTH_PROMPT_BUCKETS,
        scale=GROUND_TRUTH_LOGIT_SCALE / spec.gt_temperature,
    )


def _perturb(chosen: Sequence[int], similarity: float, vocab_size: int, rng: np.random.Generator) -> List[int]:
    copy = rng.random(len(chosen)) < similarity
    fresh = rng.integers(0, vocab_size, size=len(chosen))
    return [int(c) if keep else int(r) for c, keep, r in zip(chosen, copy, fresh)]


def generate_corpus(spec: CorpusSpec) -> List[PreferenceTriple]:
    """
    Generate the records of one split.

    Every prompt and every record draws from its own counter-keyed stream, so
    the corpus is a pure function of the spec.

    Raises:
        DomainError: If the spec is invalid
    """
    if not isinstance(spec, CorpusSpec):
        try:
            spec = CorpusSpec.model_validate(spec)
        except ValidationError as e:
            raise DomainError(f"invalid corpus spec: {e}") from e

    truth = ground_truth_policy(spec)
    records: List[PreferenceTriple] = []
    for p in range(spec.num_prompts):
        prompt = derive_rng(spec.seed, spec.split, "prompt", p).integers(0, spec.vocab_size, size=spec.prompt_len)
        prompt = tuple(int(t) for t in prompt)
        for j in range(spec.pairs_per_prompt):
            record_id = p * spec.pairs_per_prompt + j
            rng = derive_rng(spec.seed, spec.split, record_id)
            chosen = truth.sample(prompt, spec.response_len, rng)
            rejected = _perturb(chosen, spec.similarity, spec.vocab_size, rng)
            records.append(PreferenceTriple.build(record_id, prompt, chosen, rejected))
    logger.info(f"Generated {len(records)} {spec.split} records (V={spec.vocab_size}, s={spec.similarity:g})")
    return records


def corpus_similarity(records: Sequence[PreferenceTriple]) -> float:
    """Pooled per-position agreement between chosen and rejected over the shorter length."""
    if len(records) == 0:
        raise DomainError("corpus_similarity needs at least one record", value=0)
    matches = 0
    positions = 0
    for record in records:
        n = min(record.chosen.length, record.rejected.length)
        matches += sum(a == b for a, b in zip(record.chosen.tokens[:n], record.rejected.tokens[:n]))
        positions += n
    if positions == 0:
        return 0.0
    return matches / positions


def load_corpus_specs(directory: Union[str, Path]) -> Dict[str, CorpusSpec]:
    path = Path(directory) / SPEC_FILE
    if not path.is_file():
        return {}
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return {split: CorpusSpec.model_validate(body) for split, body in raw.items()}
    except (ValueError, ValidationError) as e:
        raise DataIOError(path, f"unreadable corpus spec: {e}") from e


def write_corpus(directory: Union[str, Path], spec: CorpusSpec, records: Sequence[PreferenceTriple]) -> Path:
    """
    Write ``<split>.jsonl`` and record the spec under its split in ``corpus_spec.json``.

    Returns:
        Path of the written dataset file
    """
    directory = Path(directory)
    specs = load_corpus_specs(directory)
    specs[spec.split] = spec
    dataset_path = directory / f"{spec.split}.jsonl"
    write_dataset(dataset_path, records)
    body = {split: s.model_dump(mode="json") for split, s in sorted(specs.items())}
    try:
        (directory / SPEC_FILE).write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise DataIOError(directory / SPEC_FILE, f"cannot write corpus spec: {e}") from e
    return dataset_path


def read_corpus(directory: Union[str, Path], split: Split) -> List[PreferenceTriple]:
    return read_dataset(Path(directory) / f"{split}.jsonl")
