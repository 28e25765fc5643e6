"""Exactly differentiable toy policies."""

from .base import Policy
from .checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from .frozen import FrozenPolicy
from .gradcheck import finite_diff, finite_diff_grad
from .loglinear import LogLinearPolicy
from .params import LogLinearLayout, ParamLayout, PolicyParams, TabularLayout
from .tabular import TabularPolicy

__all__ = [
    "Policy",
    "TabularPolicy",
    "LogLinearPolicy",
    "FrozenPolicy",
    "PolicyParams",
    "ParamLayout",
    "TabularLayout",
    "LogLinearLayout",
    "finite_diff",
    "finite_diff_grad",
    "encode_checkpoint",
    "decode_checkpoint",
    "save_checkpoint",
    "load_checkpoint",
]
