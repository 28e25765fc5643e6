from typing import Optional

import numpy as np

from .base import Policy
from .params import PolicyParams, TabularLayout


class TabularPolicy(Policy):
    """
    One free logits row per (prompt bucket, last-k tokens) context.

    Contexts are finite and enumerable, which makes brute-force oracles
    (normalization, closed-form maximum likelihood) available in tests.
    """

    kind = "tabular"

    @classmethod
    def uniform(
        cls, vocab_size: int, order: int = 1, prompt_buckets: int = 1, eos_token: Optional[int] = None
    ) -> "TabularPolicy":
        layout = TabularLayout(vocab_size, order=order, prompt_buckets=prompt_buckets)
        return cls(PolicyParams(np.zeros(layout.dim), layout), eos_token=eos_token)

    @classmethod
    def from_table(
        cls, table: np.ndarray, order: int = 1, prompt_buckets: int = 1, eos_token: Optional[int] = None
    ) -> "TabularPolicy":
        """Build from an explicit (num_contexts x V) logits table."""
        table = np.asarray(table, dtype=np.float64)
        layout = TabularLayout(table.shape[1], order=order, prompt_buckets=prompt_buckets)
        return cls(PolicyParams(table.reshape(-1).copy(), layout), eos_token=eos_token)

    @classmethod
    def random(
        cls,
        vocab_size: int,
        rng: np.random.Generator,
        order: int = 1,
        prompt_buckets: int = 1,
        scale: float = 1.0,
        eos_token: Optional[int] = None,
    ) -> "TabularPolicy":
        layout = TabularLayout(vocab_size, order=order, prompt_buckets=prompt_buckets)
        return cls(PolicyParams(scale * rng.standard_normal(layout.dim), layout), eos_token=eos_token)

    def context_of(self, x, prefix) -> int:
        """Row index used for the token following ``prefix``."""
        layout: TabularLayout = self.layout  # type: ignore[assignment]
        return layout.context_index(layout.prompt_bucket(tuple(x)), layout.history(tuple(prefix), len(prefix)))
