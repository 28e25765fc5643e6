"""Central finite differences, the verification oracle for analytic gradients."""

from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ..core.errors import DomainError
from .base import Policy


def finite_diff(
    fn: Callable[[np.ndarray], float], theta: np.ndarray, h: float, coords: Optional[Iterable[int]] = None
) -> np.ndarray:
    """
    (fn(theta + h e_j) - fn(theta - h e_j)) / 2h for each requested coordinate.

    Coordinates not requested are left at 0.
    """
    if not h > 0:
        raise DomainError(f"finite difference step must be positive, got {h}", value=h)
    theta = np.asarray(theta, dtype=np.float64)
    out = np.zeros_like(theta)
    shifted = theta.copy()
    for j in range(theta.shape[0]) if coords is None else coords:
        original = shifted[j]
        shifted[j] = original + h
        plus = fn(shifted)
        shifted[j] = original - h
        minus = fn(shifted)
        shifted[j] = original
        out[j] = (plus - minus) / (2.0 * h)
    return out


def finite_diff_grad(
    policy: Policy, x: Sequence[int], y: Sequence[int], h: float, coords: Optional[Iterable[int]] = None
) -> np.ndarray:
    """Finite-difference estimate of grad log pi(y|x)."""
    return finite_diff(lambda theta: policy.with_theta(theta).logprob(x, y), policy.theta, h, coords)
