"""Overflow-free logistic helpers used by every objective and target."""

import math

import numpy as np
from scipy.special import expit

from .errors import DomainError


def _check_finite(z: float, name: str) -> float:
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"{name} requires a finite argument, got {z}", value=z)
    return z


def stable_sigmoid(z: float) -> float:
    """1 / (1 + exp(-z)) without overflow for any finite z."""
    return float(expit(_check_finite(z, "stable_sigmoid")))


def neg_log_sigmoid(z: float) -> float:
    """-log(sigmoid(z)) = log(1 + exp(-z)), i.e. the softplus of -z.

    The positive branch only exponentiates -|z|, so large arguments never overflow.
    """
    z = _check_finite(z, "neg_log_sigmoid")
    if z >= 0:
        return math.log1p(math.exp(-z))
    return -z + math.log1p(math.exp(z))


def sigmoid_slope(z: float) -> float:
    """Derivative of the sigmoid, sigma(z) * sigma(-z)."""
    z = _check_finite(z, "sigmoid_slope")
    return float(expit(z) * expit(-z))


def sigmoid_difference(z: float, delta: float) -> float:
    """sigma(z + delta) - sigma(z), accurate when delta is tiny next to z."""
    z = _check_finite(z, "sigmoid_difference")
    delta = _check_finite(delta, "sigmoid_difference")
    if delta < 0:
        return -sigmoid_difference(z + delta, -delta)
    # sigma(b) - sigma(a) = sigma(b) * sigma(-a) * (1 - exp(a - b))
    return float(expit(z + delta) * expit(-z) * -math.expm1(-delta))


def sigmoid_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise DomainError("sigmoid requires finite arguments")
    return expit(z)
