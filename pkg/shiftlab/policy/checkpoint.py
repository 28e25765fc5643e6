"""
Binary policy checkpoints.

Layout: struct ``<4sBIIIiQ`` header (magic, backend kind, V, order, width,
eos id or -1, d) followed by d little-endian float64 parameters.
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..core.errors import DataIOError
from .base import Policy
from .frozen import FrozenPolicy
from .loglinear import LogLinearPolicy
from .params import LogLinearLayout, PolicyParams, TabularLayout
from .tabular import TabularPolicy

logger = logging.getLogger(__name__)

MAGIC = b"DPSK"
HEADER = struct.Struct("<4sBIIIiQ")
_KIND_CODES = {"tabular": 0, "loglinear": 1}


def encode_checkpoint(policy: Union[Policy, FrozenPolicy]) -> bytes:
    layout = policy.layout
    eos = -1 if policy.eos_token is None else policy.eos_token
    header = HEADER.pack(MAGIC, _KIND_CODES[policy.kind], layout.vocab_size, layout.order, layout.width, eos, policy.dim)
    return header + np.asarray(policy.theta, dtype="<f8").tobytes()


def decode_checkpoint(blob: bytes, source: str = "<bytes>") -> Policy:
    if len(blob) < HEADER.size:
        raise DataIOError(source, "truncated checkpoint header")
    magic, kind, vocab, order, width, eos, dim = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise DataIOError(source, f"bad checkpoint magic {magic!r}")
    if len(blob) != HEADER.size + 8 * dim:
        raise DataIOError(source, f"expected {dim} parameters, found {(len(blob) - HEADER.size) / 8:g}")
    theta = np.frombuffer(blob, dtype="<f8", offset=HEADER.size).astype(np.float64)
    eos_token = None if eos < 0 else eos
    if kind == 0:
        layout = TabularLayout(vocab, order=order, prompt_buckets=width)
        return TabularPolicy(PolicyParams(theta, layout), eos_token=eos_token)
    if kind == 1:
        layout = LogLinearLayout(vocab, feature_dim=width, order=order)
        return LogLinearPolicy(PolicyParams(theta, layout), eos_token=eos_token)
    raise DataIOError(source, f"unknown backend kind {kind}")


def save_checkpoint(path: Union[str, Path], policy: Union[Policy, FrozenPolicy]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_checkpoint(policy))
    except OSError as e:
        raise DataIOError(path, f"cannot write checkpoint: {e}") from e
    logger.info(f"Saved {policy.kind} checkpoint ({policy.dim} parameters) to {path}")


def load_checkpoint(path: Union[str, Path]) -> Policy:
    path = Path(path)
    if not path.is_file():
        raise DataIOError(path, "checkpoint not found")
    return decode_checkpoint(path.read_bytes(), source=str(path))
