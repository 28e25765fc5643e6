"""
Parameter vectors and the layouts that map (context feature, token) to a flat index.

Every backend stores its parameters as a (num_rows x V) matrix flattened
row-major into ``theta``. A layout turns a (prompt, response) pair into, for
each response position, the rows that are active and their feature values;
the position's logits are the value-weighted sum of those rows.
"""

import math
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from ..core.errors import DomainError
from .hashing import bucket_of, multiply_shift

MAX_ORDER = 3
POSITION_BUCKETS = 8
LOGLINEAR_PROMPT_BUCKETS = 64

# feature kinds of the log-linear layout
_BIAS, _PROMPT, _TOKEN, _POSITION, _PAIR = 1, 2, 3, 4, 5

ActiveRows = Tuple[np.ndarray, np.ndarray]  # (T, n_active) int rows, (T, n_active) float values


class ParamLayout(ABC):
    """Maps contexts to parameter rows for a fixed vocabulary."""

    kind: str = ""

    def __init__(self, vocab_size: int, order: int):
        if vocab_size < 2:
            raise DomainError(f"vocab_size must be at least 2, got {vocab_size}", value=vocab_size)
        if not 0 <= order <= MAX_ORDER:
            raise DomainError(f"context order must lie in [0, {MAX_ORDER}], got {order}", value=order)
        self.vocab_size = vocab_size
        self.order = order
        self.bos = vocab_size  # pad id for positions before the response starts
        self._active_cached = lru_cache(maxsize=None)(self._active)

    @property
    @abstractmethod
    def num_rows(self) -> int: ...

    @property
    @abstractmethod
    def width(self) -> int:
        """Backend-specific size recorded in checkpoints (prompt buckets or feature dimension)."""

    @property
    def dim(self) -> int:
        return self.num_rows * self.vocab_size

    def index(self, row: int, token: int) -> int:
        return row * self.vocab_size + token

    def prompt_bucket(self, prompt: Sequence[int]) -> int:
        return 0

    def history(self, prefix: Sequence[int], position: int) -> Tuple[int, ...]:
        """The last ``order`` tokens before ``position``, most recent first, BOS-padded."""
        return tuple(prefix[position - j] if position - j >= 0 else self.bos for j in range(1, self.order + 1))

    @abstractmethod
    def position_rows(self, prompt: Tuple[int, ...], prefix: Tuple[int, ...], position: int) -> ActiveRows: ...

    def _active(self, prompt: Tuple[int, ...], response: Tuple[int, ...]) -> ActiveRows:
        rows, vals = [], []
        for i in range(len(response)):
            r, v = self.position_rows(prompt, response, i)
            rows.append(r)
            vals.append(v)
        if not rows:
            return np.zeros((0, self.active_count), dtype=np.int64), np.zeros((0, self.active_count))
        return np.stack(rows), np.stack(vals)

    def active(self, prompt: Sequence[int], response: Sequence[int]) -> ActiveRows:
        """Active rows and values for every position of ``response``; cached per token content."""
        return self._active_cached(tuple(prompt), tuple(response))

    @property
    @abstractmethod
    def active_count(self) -> int: ...

    def check_tokens(self, tokens: Sequence[int], what: str) -> None:
        for t in tokens:
            if t < 0 or t >= self.vocab_size:
                raise DomainError(f"{what} token {t} outside vocabulary [0, {self.vocab_size})", value=t)


class TabularLayout(ParamLayout):
    """One logits row per (prompt bucket, last-k tokens) context."""

    kind = "tabular"

    def __init__(self, vocab_size: int, order: int = 1, prompt_buckets: int = 1):
        super().__init__(vocab_size, order)
        if prompt_buckets < 1:
            raise DomainError(f"prompt_buckets must be positive, got {prompt_buckets}", value=prompt_buckets)
        self.prompt_buckets = prompt_buckets
        self._one = np.ones(1)

    @property
    def num_contexts(self) -> int:
        return self.prompt_buckets * (self.vocab_size + 1) ** self.order

    @property
    def num_rows(self) -> int:
        return self.num_contexts

    @property
    def width(self) -> int:
        return self.prompt_buckets

    @property
    def active_count(self) -> int:
        return 1

    def prompt_bucket(self, prompt: Sequence[int]) -> int:
        return bucket_of(prompt, self.prompt_buckets)

    def context_index(self, bucket: int, history: Tuple[int, ...]) -> int:
        index = bucket
        for token in history:
            index = index * (self.vocab_size + 1) + token
        return index

    def position_rows(self, prompt, prefix, position) -> ActiveRows:
        row = self.context_index(self.prompt_bucket(prompt), self.history(prefix, position))
        return np.array([row], dtype=np.int64), self._one


class LogLinearLayout(ParamLayout):
    """Hashed sparse features phi(x, prefix) feeding an (m x V) weight matrix."""

    kind = "loglinear"

    def __init__(self, vocab_size: int, feature_dim: int = 256, order: int = 1):
        super().__init__(vocab_size, order)
        if feature_dim < 1:
            raise DomainError(f"feature_dim must be positive, got {feature_dim}", value=feature_dim)
        self.feature_dim = feature_dim
        self.prompt_buckets = LOGLINEAR_PROMPT_BUCKETS
        self._value = 1.0 / math.sqrt(self.active_count)

    @property
    def num_rows(self) -> int:
        return self.feature_dim

    @property
    def width(self) -> int:
        return self.feature_dim

    @property
    def active_count(self) -> int:
        return 4 + self.order

    def prompt_bucket(self, prompt: Sequence[int]) -> int:
        return bucket_of(prompt, self.prompt_buckets)

    def _slot(self, *key: int) -> int:
        return multiply_shift(key) % self.feature_dim

    def feature_keys(self, prompt, prefix, position):
        bucket = self.prompt_bucket(prompt)
        history = self.history(prefix, position)
        keys = [(_BIAS,), (_PROMPT, bucket)]
        keys.extend((_TOKEN, offset, token) for offset, token in enumerate(history, start=1))
        keys.append((_POSITION, min(position.bit_length(), POSITION_BUCKETS - 1)))
        previous = history[0] if history else self.bos
        keys.append((_PAIR, bucket, previous))
        return keys

    def position_rows(self, prompt, prefix, position) -> ActiveRows:
        rows = np.array([self._slot(*key) for key in self.feature_keys(prompt, prefix, position)], dtype=np.int64)
        return rows, np.full(rows.shape[0], self._value)

    def features(self, prompt: Sequence[int], prefix: Sequence[int], position: int) -> np.ndarray:
        """Dense phi(x, prefix) of length m; colliding features add up."""
        rows, vals = self.position_rows(tuple(prompt), tuple(prefix), position)
        phi = np.zeros(self.feature_dim)
        np.add.at(phi, rows, vals)
        return phi


class PolicyParams:
    """A flat parameter vector together with the layout that interprets it."""

    __slots__ = ("theta", "layout")

    def __init__(self, theta: np.ndarray, layout: ParamLayout):
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim != 1 or theta.shape[0] != layout.dim:
            raise DomainError(f"theta must be a vector of length {layout.dim}, got shape {theta.shape}")
        if theta.shape[0] == 0:
            raise DomainError("theta must have at least one entry")
        if not np.all(np.isfinite(theta)):
            raise DomainError("theta must be finite")
        self.theta = theta
        self.layout = layout

    @property
    def dim(self) -> int:
        return self.theta.shape[0]

    def matrix(self) -> np.ndarray:
        """Row view (num_rows x V) sharing memory with theta."""
        return self.theta.reshape(self.layout.num_rows, self.layout.vocab_size)

    def copy(self) -> "PolicyParams":
        return PolicyParams(self.theta.copy(), self.layout)

    def with_theta(self, theta: np.ndarray) -> "PolicyParams":
        return PolicyParams(theta, self.layout)
