"""Contains shared error types raised across shiftlab"""

from typing import Optional


class ShiftLabError(Exception):
    """Base class for every error raised deliberately by shiftlab"""


class DomainError(ShiftLabError, ValueError):
    """Raised when an input lies outside the domain of an operation"""

    def __init__(self, message: str, value: object = None):
        self.value = value
        super().__init__(message)


class NumericError(ShiftLabError, ArithmeticError):
    """Raised when a computation produces non-finite values"""

    def __init__(self, message: str, step: Optional[int] = None, eta: Optional[float] = None):
        self.step = step
        self.eta = eta
        details = []
        if step is not None:
            details.append(f"step={step}")
        if eta is not None:
            details.append(f"eta={eta:g}")
        suffix = f" ({', '.join(details)})" if details else ""
        super().__init__(f"{message}{suffix}")


class PolicyCollapseError(NumericError):
    """Raised when the mean per-token log-probability of the chosen responses falls below the collapse bound"""

    def __init__(self, mean_token_logprob: float, bound: float, step: int):
        self.mean_token_logprob = mean_token_logprob
        self.bound = bound
        super().__init__(
            f"policy collapse: mean per-token log-prob {mean_token_logprob:.4f} fell below {bound:.4f}",
            step=step,
        )


class DataIOError(ShiftLabError, OSError):
    """Raised when a dataset, checkpoint or run file cannot be read or written"""

    def __init__(self, path: object, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class UsageError(ShiftLabError):
    """Raised for malformed command lines and invalid configuration overrides"""


__all__ = [
    "ShiftLabError",
    "DomainError",
    "NumericError",
    "PolicyCollapseError",
    "DataIOError",
    "UsageError",
]
