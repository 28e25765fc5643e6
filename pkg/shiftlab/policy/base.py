"""
Autoregressive categorical policies with exact log-probabilities and gradients.

log pi(y|x) = sum_i log softmax(logits(x, y[:i]))[y_i], where the logits at a
position are the value-weighted sum of the parameter rows its layout marks as
active. The gradient of one position with respect to an active row r with
value v is v * (onehot(y_i) - softmax(logits)), so both backends share a single
evaluator.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import log_softmax

from ..core.errors import DomainError
from .params import ParamLayout, PolicyParams

logger = logging.getLogger(__name__)


class Policy:
    """pi_theta(y|x) over a fixed vocabulary, parameterized by a flat vector."""

    kind: str = ""

    def __init__(self, params: PolicyParams, eos_token: Optional[int] = None):
        if eos_token is not None and not 0 <= eos_token < params.layout.vocab_size:
            raise DomainError(f"eos_token {eos_token} outside vocabulary", value=eos_token)
        self.params = params
        self.eos_token = eos_token

    # ------------------------------------------------------------------ structure

    @property
    def layout(self) -> ParamLayout:
        return self.params.layout

    @property
    def vocab_size(self) -> int:
        return self.params.layout.vocab_size

    @property
    def theta(self) -> np.ndarray:
        return self.params.theta

    @property
    def dim(self) -> int:
        return self.params.dim

    def with_theta(self, theta: np.ndarray) -> "Policy":
        """A policy of the same backend and layout with new parameters."""
        return type(self)(self.params.with_theta(theta), eos_token=self.eos_token)

    def copy(self) -> "Policy":
        return type(self)(self.params.copy(), eos_token=self.eos_token)

    # ------------------------------------------------------------------ evaluation

    def _prepare(self, x: Sequence[int], y: Sequence[int]) -> Tuple[tuple, tuple]:
        x, y = tuple(x), tuple(y)
        self.layout.check_tokens(x, "prompt")
        self.layout.check_tokens(y, "response")
        return x, y

    def _position_log_softmax(self, rows: np.ndarray, vals: np.ndarray) -> np.ndarray:
        weights = self.params.matrix()
        logits = np.einsum("ta,tav->tv", vals, weights[rows])
        return log_softmax(logits, axis=-1)

    def token_logprobs(self, x: Sequence[int], y: Sequence[int]) -> np.ndarray:
        """Per-position log pi(y_i | x, y[:i])."""
        x, y = self._prepare(x, y)
        if not y:
            return np.zeros(0)
        rows, vals = self.layout.active(x, y)
        lsm = self._position_log_softmax(rows, vals)
        return lsm[np.arange(len(y)), np.asarray(y)]

    def logprob(self, x: Sequence[int], y: Sequence[int]) -> float:
        """log pi(y|x); 0 for an empty response."""
        return float(np.sum(self.token_logprobs(x, y)))

    def token_logprob_deltas(self, x: Sequence[int], y: Sequence[int], delta: np.ndarray) -> np.ndarray:
        """
        Per-position log pi_{theta + delta}(y_i | ...) - log pi_theta(y_i | ...).

        Computed from the logit change and log1p of the softmax-weighted expm1,
        so tiny moves keep full relative precision instead of being the
        difference of two log-probabilities of order |y| ln V.

        Raises:
            DomainError: If ``delta`` does not match theta's shape
        """
        delta = np.asarray(delta, dtype=np.float64)
        if delta.shape != self.theta.shape:
            raise DomainError(f"delta must have shape {self.theta.shape}, got {delta.shape}")
        x, y = self._prepare(x, y)
        if not y:
            return np.zeros(0)
        rows, vals = self.layout.active(x, y)
        lsm = self._position_log_softmax(rows, vals)
        d_weights = delta.reshape(self.layout.num_rows, self.vocab_size)
        d_logits = np.einsum("ta,tav->tv", vals, d_weights[rows])
        log_norm_change = np.log1p(np.sum(np.exp(lsm) * np.expm1(d_logits), axis=-1))
        return d_logits[np.arange(len(y)), np.asarray(y)] - log_norm_change

    def logprob_and_grad(self, x: Sequence[int], y: Sequence[int]) -> Tuple[float, np.ndarray]:
        x, y = self._prepare(x, y)
        grad = np.zeros(self.dim)
        if not y:
            return 0.0, grad
        rows, vals = self.layout.active(x, y)
        lsm = self._position_log_softmax(rows, vals)
        targets = np.asarray(y)
        positions = np.arange(len(y))
        delta = -np.exp(lsm)
        delta[positions, targets] += 1.0
        contrib = vals[:, :, None] * delta[:, None, :]
        np.add.at(grad.reshape(self.layout.num_rows, self.vocab_size), rows.ravel(), contrib.reshape(-1, self.vocab_size))
        return float(np.sum(lsm[positions, targets])), grad

    def grad_logprob(self, x: Sequence[int], y: Sequence[int]) -> np.ndarray:
        """Exact gradient of log pi(y|x) with respect to theta."""
        return self.logprob_and_grad(x, y)[1]

    def next_token_logprobs(self, x: Sequence[int], prefix: Sequence[int]) -> np.ndarray:
        """Full log-distribution over the next token after ``prefix``."""
        x, prefix = self._prepare(x, prefix)
        rows, vals = self.layout.position_rows(x, prefix, len(prefix))
        return self._position_log_softmax(rows[None, :], vals[None, :])[0]

    # ------------------------------------------------------------------ generation

    def sample(self, x: Sequence[int], max_len: int, rng: np.random.Generator) -> Tuple[int, ...]:
        """
        Ancestral sampling until the end token (inclusive) or ``max_len`` tokens.

        Args:
            x: Prompt tokens
            max_len: Maximum number of sampled tokens, at least 1
            rng: Seeded generator; the same seed yields the same sequence

        Returns:
            Sampled response tokens
        """
        if max_len < 1:
            raise DomainError(f"max_len must be at least 1, got {max_len}", value=max_len)
        prefix: list = []
        for _ in range(max_len):
            probs = np.exp(self.next_token_logprobs(x, prefix))
            token = int(rng.choice(self.vocab_size, p=probs / probs.sum()))
            prefix.append(token)
            if self.eos_token is not None and token == self.eos_token:
                break
        return tuple(prefix)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(V={self.vocab_size}, order={self.layout.order}, d={self.dim})"
