"""
Plain SGD and bias-corrected Adam over a flat parameter vector.

The optimizer is the single writer of the parameters: ``optimizer_step``
returns a new state and never mutates the arrays it was given.
"""

import logging
from typing import Optional

import numpy as np

from ..core.errors import NumericError
from .config import OptimizerConfig

logger = logging.getLogger(__name__)


class OptimizerState:
    """Parameters plus Adam moments and the step counter."""

    __slots__ = ("theta", "m", "v", "t")

    def __init__(self, theta: np.ndarray, m: Optional[np.ndarray] = None, v: Optional[np.ndarray] = None, t: int = 0):
        self.theta = np.asarray(theta, dtype=np.float64)
        self.m = np.zeros_like(self.theta) if m is None else m
        self.v = np.zeros_like(self.theta) if v is None else v
        self.t = t

    @classmethod
    def initial(cls, theta: np.ndarray) -> "OptimizerState":
        return cls(np.array(theta, dtype=np.float64, copy=True))

    def __repr__(self) -> str:
        return f"OptimizerState(t={self.t}, d={self.theta.shape[0]})"


def optimizer_step(state: OptimizerState, grad: np.ndarray, hyper: OptimizerConfig) -> OptimizerState:
    """
    One descent step on ``grad``.

    SGD: theta <- theta - lr * g.
    Adam: m <- b1 m + (1 - b1) g, v <- b2 v + (1 - b2) g^2,
    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps) with bias-corrected moments.

    Raises:
        NumericError: If the gradient has non-finite entries
    """
    grad = np.asarray(grad, dtype=np.float64)
    t = state.t + 1
    if not np.all(np.isfinite(grad)):
        raise NumericError("non-finite gradient", step=t)

    if hyper.kind == "sgd":
        return OptimizerState(state.theta - hyper.lr * grad, state.m, state.v, t)

    m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * grad
    v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * (grad * grad)
    m_hat = m / (1.0 - hyper.beta1**t)
    v_hat = v / (1.0 - hyper.beta2**t)
    theta = state.theta - hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.eps)
    return OptimizerState(theta, m, v, t)
