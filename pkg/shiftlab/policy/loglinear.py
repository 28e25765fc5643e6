from typing import Optional

import numpy as np

from .base import Policy
from .params import LogLinearLayout, PolicyParams


class LogLinearPolicy(Policy):
    """
    Softmax over phi(x, prefix)^T W with a hashed sparse feature map.

    Features (bias, prompt bucket, recent tokens, position bucket) are shared
    across records, so gradients of different samples interact.
    """

    kind = "loglinear"

    @classmethod
    def create(
        cls,
        vocab_size: int,
        feature_dim: int = 256,
        order: int = 1,
        rng: Optional[np.random.Generator] = None,
        scale: float = 0.0,
        eos_token: Optional[int] = None,
    ) -> "LogLinearPolicy":
        """
        Args:
            vocab_size: Vocabulary size V
            feature_dim: Number of hashed feature slots m
            order: Number of previous tokens entering the features
            rng: Generator for random initial weights; zeros when omitted
            scale: Standard deviation of the random initial weights
            eos_token: Optional token that ends sampling
        """
        layout = LogLinearLayout(vocab_size, feature_dim=feature_dim, order=order)
        theta = np.zeros(layout.dim) if rng is None else scale * rng.standard_normal(layout.dim)
        return cls(PolicyParams(theta, layout), eos_token=eos_token)

    def features(self, x, prefix) -> np.ndarray:
        return self.layout.features(x, prefix, len(prefix))  # type: ignore[attr-defined]
