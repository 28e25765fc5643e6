import math
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.errors import DomainError


class Histogram:
    """Fixed-edge bin counts plus the values that fell outside the range."""

    __slots__ = ("bins", "underflow", "overflow")

    def __init__(self, bins: pd.DataFrame, underflow: int, overflow: int):
        self.bins = bins
        self.underflow = underflow
        self.overflow = overflow

    @property
    def total(self) -> int:
        return int(self.bins["count"].sum()) + self.underflow + self.overflow

    def to_string(self) -> str:
        text = self.bins.to_string(index=False)
        return f"{text}\nunderflow: {self.underflow}  overflow: {self.overflow}"


def emit_histogram(values: Sequence[float], bin_count: int, value_range: Tuple[float, float]) -> Histogram:
    """
    Count values into ``bin_count`` equal-width bins over ``value_range``.

    The last bin is closed on the right. Values below or above the range are
    tallied in ``underflow`` / ``overflow``; NaNs are ignored.

    Raises:
        DomainError: If bin_count < 1 or the range is inverted or not finite
    """
    if bin_count < 1:
        raise DomainError(f"bin_count must be at least 1, got {bin_count}", value=bin_count)
    lo, hi = (float(v) for v in value_range)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"histogram range must be finite, got ({lo}, {hi})", value=value_range)
    if not lo < hi:
        raise DomainError(f"histogram range is inverted or empty: ({lo}, {hi})", value=value_range)

    data = np.asarray(values, dtype=np.float64).ravel()
    data = data[~np.isnan(data)]
    counts, edges = np.histogram(data, bins=bin_count, range=(lo, hi))
    bins = pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts.astype(np.int64)})
    return Histogram(bins, underflow=int(np.count_nonzero(data < lo)), overflow=int(np.count_nonzero(data > hi)))
