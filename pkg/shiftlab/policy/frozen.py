from typing import Sequence

import numpy as np

from .base import Policy


class FrozenPolicy:
    """
    Read-only snapshot of a policy, used as the reference model.

    The parameter array is a private copy with the numpy write flag cleared,
    so in-place updates of the live policy can never leak into it.
    """

    __slots__ = ("_policy",)

    def __init__(self, policy: Policy):
        theta = policy.theta.copy()
        theta.setflags(write=False)
        self._policy = policy.with_theta(theta)

    @classmethod
    def freeze(cls, policy: Policy) -> "FrozenPolicy":
        return cls(policy)

    @property
    def kind(self) -> str:
        return self._policy.kind

    @property
    def layout(self):
        return self._policy.layout

    @property
    def vocab_size(self) -> int:
        return self._policy.vocab_size

    @property
    def dim(self) -> int:
        return self._policy.dim

    @property
    def theta(self) -> np.ndarray:
        return self._policy.theta

    @property
    def eos_token(self):
        return self._policy.eos_token

    def logprob(self, x: Sequence[int], y: Sequence[int]) -> float:
        return self._policy.logprob(x, y)

    def token_logprobs(self, x: Sequence[int], y: Sequence[int]) -> np.ndarray:
        return self._policy.token_logprobs(x, y)

    def thaw(self) -> Policy:
        """A mutable copy, used to start preference optimization from the reference."""
        return self._policy.copy()

    def __repr__(self) -> str:
        return f"FrozenPolicy({self._policy!r})"
