"""End-to-end flows used by the command line and the sweep: data, reference, run directory."""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

from ..core.dataset_io import read_dataset
from ..core.errors import DomainError
from ..core.types import PreferenceTriple
from ..core.validation import validate_dataset
from ..datagen.corpus import generate_corpus
from ..diagnostics.targets import omega1
from ..policy.checkpoint import load_checkpoint
from ..policy.frozen import FrozenPolicy
from .config import RunConfig
from .rundir import RunSummary, build_summary, write_run_dir, write_sft_dir
from .training import RunArtifacts, fit_sft, train_po

logger = logging.getLogger(__name__)

Corpus = List[PreferenceTriple]


def _checked(records: Corpus, vocab_size: int, name: str) -> Corpus:
    report = validate_dataset(records, vocab_size)
    if not report.passed:
        first = report.violations[0]
        raise DomainError(
            f"{name} set has {len(report.violations)} invalid records "
            f"(first: record {first.record_id}, {first.kind} {first.detail})".rstrip()
        )
    return records


def load_corpora(config: RunConfig) -> Tuple[Corpus, Corpus]:
    """Train and test records from the configured files, or generated from the corpus spec."""
    data = config.data
    spec = data.corpus
    if data.train_path:
        train = read_dataset(data.train_path)
    else:
        train = generate_corpus(spec.for_split("train", spec.num_prompts))
    if data.test_path:
        test = read_dataset(data.test_path)
    else:
        test = generate_corpus(spec.for_split("test", data.test_prompts))
    return _checked(train, spec.vocab_size, "train"), _checked(test, spec.vocab_size, "test")


def resolve_reference(
    config: RunConfig, train: Corpus, out_dir: Union[str, Path, None] = None
) -> Tuple[FrozenPolicy, Optional[str]]:
    """
    The frozen reference policy and the checkpoint it lives in.

    Loads ``policy.reference_checkpoint`` when set; otherwise runs SFT on the
    train set and, given ``out_dir``, saves it there.
    """
    path = config.policy.reference_checkpoint
    if path:
        policy = load_checkpoint(path)
        if policy.vocab_size != config.data.corpus.vocab_size:
            raise DomainError(
                f"reference checkpoint has V={policy.vocab_size}, corpus has V={config.data.corpus.vocab_size}"
            )
        logger.info(f"Loaded reference {policy!r} from {path}")
        return FrozenPolicy.freeze(policy), str(path)
    sft = fit_sft(config, train)
    checkpoint = None
    if out_dir is not None:
        checkpoint = str(write_sft_dir(out_dir, config, sft))
    return FrozenPolicy.freeze(sft.policy), checkpoint


def run_experiment(
    config: RunConfig,
    out_dir: Union[str, Path, None] = None,
    ref: Optional[FrozenPolicy] = None,
    corpora: Optional[Tuple[Corpus, Corpus]] = None,
    reference_checkpoint: Optional[str] = None,
) -> Tuple[RunArtifacts, RunSummary]:
    """
    Run preference optimization and write its run directory.

    Args:
        config: Resolved run configuration
        out_dir: Run directory; ``config.output_dir`` when omitted
        ref: Shared reference; resolved from the config when omitted
        corpora: Shared (train, test) records; loaded from the config when omitted
        reference_checkpoint: Where ``ref`` was saved, recorded in the summary
    """
    out_dir = Path(out_dir or config.output_dir)
    train, test = corpora if corpora is not None else load_corpora(config)
    if ref is None:
        ref, reference_checkpoint = resolve_reference(config, train, out_dir)
    artifacts = train_po(config, train, ref, testset=test)
    summary = build_summary(config, artifacts, omega1(ref, test), reference_checkpoint)
    write_run_dir(out_dir, config, artifacts, summary)
    return artifacts, summary
