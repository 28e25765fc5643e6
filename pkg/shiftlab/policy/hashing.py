"""Multiply-shift hashing for prompt buckets and log-linear feature slots."""

from typing import Iterable

MULTIPLIER = 0x9E3779B97F4A7C15  # odd 64-bit golden-ratio constant
_MASK64 = (1 << 64) - 1


def multiply_shift(values: Iterable[int]) -> int:
    """Fold a sequence of non-negative ints into a 32-bit hash (high half of a 64-bit product)."""
    h = 0
    for v in values:
        h = ((h ^ (int(v) + 1)) * MULTIPLIER) & _MASK64
    return h >> 32


def bucket_of(values: Iterable[int], buckets: int) -> int:
    return multiply_shift(values) % buckets
