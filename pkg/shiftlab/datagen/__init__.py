"""Synthetic preference corpora."""

from .corpus import (
    DESK_CORPUS_SPEC,
    DESK_TEST_PROMPTS,
    CorpusSpec,
    corpus_similarity,
    generate_corpus,
    ground_truth_policy,
    load_corpus_specs,
    read_corpus,
    write_corpus,
)

__all__ = [
    "CorpusSpec",
    "DESK_CORPUS_SPEC",
    "DESK_TEST_PROMPTS",
    "generate_corpus",
    "ground_truth_policy",
    "corpus_similarity",
    "write_corpus",
    "read_corpus",
    "load_corpus_specs",
]
