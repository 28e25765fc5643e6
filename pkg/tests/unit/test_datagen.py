"""
Tests for the synthetic corpus generator and its similarity knob.

$ pytest tests/unit/test_datagen.py -v
"""

import json
import logging
import math

import pytest

from shiftlab.core.errors import DomainError
from shiftlab.core.types import PreferenceTriple
from shiftlab.core.validation import validate_dataset
from shiftlab.datagen import (
    CorpusSpec,
    corpus_similarity,
    generate_corpus,
    ground_truth_policy,
    load_corpus_specs,
    read_corpus,
    write_corpus,
)

logger = logging.getLogger(__name__)


def _spec(**overrides) -> CorpusSpec:
    base = dict(vocab_size=16, num_prompts=25, prompt_len=4, pairs_per_prompt=4, response_len=10, seed=3)
    base.update(overrides)
    return CorpusSpec(**base)


class TestGenerateCorpus:
    def test_shape(self):
        spec = _spec()
        records = generate_corpus(spec)
        assert len(records) == spec.record_count == 100
        assert [r.id for r in records] == list(range(100))
        assert all(len(r.chosen) == 10 and len(r.rejected) == 10 and len(r.prompt) == 4 for r in records)
        # pairs of one prompt share it
        assert records[0].prompt == records[3].prompt

    def test_full_similarity_copies_chosen(self):
        records = generate_corpus(_spec(similarity=1.0))
        assert all(r.rejected == r.chosen for r in records)
        assert corpus_similarity(records) == 1.0

    def test_zero_similarity_is_chance_level(self):
        spec = _spec(similarity=0.0, num_prompts=200)
        records = generate_corpus(spec)
        n = sum(len(r.chosen) for r in records)
        p = 1.0 / spec.vocab_size
        sigma = math.sqrt(p * (1 - p) / n)
        assert abs(corpus_similarity(records) - p) <= 5 * sigma
        logger.info(f"✓ s = 0 agreement {corpus_similarity(records):.4f} is within 5 sigma of {p:.4f}")

    def test_copy_rate(self):
        spec = CorpusSpec(vocab_size=64, num_prompts=250, pairs_per_prompt=4, response_len=20, similarity=0.9)
        records = generate_corpus(spec)
        assert len(records) == 1000
        assert 0.88 <= corpus_similarity(records) <= 0.92

    def test_similarity_monotone(self):
        values = []
        for s in (0.0, 0.25, 0.5, 0.75, 1.0):
            values.append(corpus_similarity(generate_corpus(_spec(similarity=s, num_prompts=250, response_len=8))))
        assert all(a <= b for a, b in zip(values, values[1:])), values
        logger.info(f"✓ similarity grows with s: {[round(v, 3) for v in values]}")

    def test_deterministic(self):
        assert generate_corpus(_spec()) == generate_corpus(_spec())
        assert generate_corpus(_spec()) != generate_corpus(_spec(seed=4))

    def test_splits_differ(self):
        train = generate_corpus(_spec(split="train"))
        test = generate_corpus(_spec(split="test"))
        assert [r.prompt for r in train] != [r.prompt for r in test]

    def test_valid(self):
        spec = _spec(similarity=0.5)
        assert validate_dataset(generate_corpus(spec), spec.vocab_size).passed

    def test_invalid_spec(self):
        with pytest.raises(DomainError):
            generate_corpus({"vocab_size": 1})  # type: ignore[arg-type]
        with pytest.raises(DomainError):
            generate_corpus({"similarity": 1.5})  # type: ignore[arg-type]

    def test_ground_truth_depends_on_seed(self):
        a = ground_truth_policy(_spec(seed=1))
        b = ground_truth_policy(_spec(seed=1, similarity=0.2))
        c = ground_truth_policy(_spec(seed=2))
        assert (a.theta == b.theta).all()
        assert not (a.theta == c.theta).all()


class TestCorpusSimilarity:
    def test_identical_pairs(self):
        records = [PreferenceTriple.build(0, [0], [1, 2, 3], [1, 2, 3])]
        assert corpus_similarity(records) == 1.0

    def test_disjoint_alphabets(self):
        records = [PreferenceTriple.build(0, [0], [1, 2, 1], [3, 4, 3])]
        assert corpus_similarity(records) == 0.0

    def test_shorter_length_only(self):
        records = [PreferenceTriple.build(0, [0], [1, 2, 3, 4], [1, 5])]
        assert corpus_similarity(records) == 0.5

    def test_empty(self):
        with pytest.raises(DomainError):
            corpus_similarity([])


class TestCorpusFiles:
    def test_byte_identical_files(self, tmp_path):
        spec = _spec()
        for name in ("a", "b"):
            write_corpus(tmp_path / name, spec, generate_corpus(spec))
        for filename in ("train.jsonl", "corpus_spec.json"):
            assert (tmp_path / "a" / filename).read_bytes() == (tmp_path / "b" / filename).read_bytes()
        logger.info("✓ identical specs write byte-identical corpus files")

    def test_spec_file_keeps_both_splits(self, tmp_path):
        spec = _spec()
        write_corpus(tmp_path, spec.for_split("train", 10), generate_corpus(spec.for_split("train", 10)))
        write_corpus(tmp_path, spec.for_split("test", 5), generate_corpus(spec.for_split("test", 5)))
        specs = load_corpus_specs(tmp_path)
        assert set(specs) == {"train", "test"}
        assert specs["test"].num_prompts == 5
        assert sorted(json.loads((tmp_path / "corpus_spec.json").read_text())) == ["test", "train"]
        assert len(read_corpus(tmp_path, "test")) == 5 * spec.pairs_per_prompt
