"""Counter-based random streams derived from a single top-level seed."""

import zlib
from typing import Union

import numpy as np

PathPart = Union[int, str]


def _encode(part: PathPart) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValueError(f"seed path components must be non-negative, got {part}")
    return int(part)


def derive_rng(seed: int, *path: PathPart) -> np.random.Generator:
    """
    Independent generator for the stream named by ``path`` under ``seed``.

    The same (seed, path) always yields the same stream, regardless of how many
    other streams were drawn before it.
    """
    entropy = [int(seed)] + [_encode(p) for p in path]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
