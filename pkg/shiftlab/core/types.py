"""
Domain types shared by every shiftlab module.

All types are immutable pydantic models so they can be passed freely between
threads of a parallel per-sample map.
"""

from typing import Iterator, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, RootModel


class TokenSeq(RootModel[Tuple[int, ...]]):
    """An ordered sequence of dense token ids."""

    model_config = ConfigDict(frozen=True)

    @property
    def tokens(self) -> Tuple[int, ...]:
        return self.root

    @property
    def length(self) -> int:
        return len(self.root)

    def __len__(self) -> int:
        return len(self.root)

    def __iter__(self) -> Iterator[int]:  # type: ignore[override]
        return iter(self.root)

    def __getitem__(self, index):
        return self.root[index]

    @classmethod
    def of(cls, tokens) -> "TokenSeq":
        return cls(tuple(int(t) for t in tokens))


class PreferenceTriple(BaseModel):
    """One (prompt, chosen, rejected) record of a preference corpus."""

    model_config = ConfigDict(frozen=True)

    id: int
    prompt: TokenSeq
    chosen: TokenSeq
    rejected: TokenSeq

    @classmethod
    def build(cls, id: int, prompt, chosen, rejected) -> "PreferenceTriple":
        return cls(id=id, prompt=TokenSeq.of(prompt), chosen=TokenSeq.of(chosen), rejected=TokenSeq.of(rejected))

    def swapped(self) -> "PreferenceTriple":
        """The same record with chosen and rejected exchanged."""
        return self.model_copy(update={"chosen": self.rejected, "rejected": self.chosen})


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    record_id: int
    kind: str  # out_of_vocabulary, empty_chosen, empty_rejected, duplicate_id
    detail: str = ""


class ValidationReport(BaseModel):
    """Outcome of checking a dataset against the PreferenceTriple invariants."""

    model_config = ConfigDict(frozen=True)

    record_count: int
    vocab_size: int
    violations: Tuple[Violation, ...] = Field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def by_kind(self, kind: str) -> List[Violation]:
        return [v for v in self.violations if v.kind == kind]
