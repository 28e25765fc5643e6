"""
DPO and DPO-Shift on small, exactly differentiable policies.

Usage:
    from shiftlab import CorpusSpec, generate_corpus, LogLinearPolicy, dpo_shift_loss
"""

from shiftlab.core import (
    PreferenceTriple,
    Settings,
    TokenSeq,
    get_settings,
    neg_log_sigmoid,
    reset_settings,
    stable_sigmoid,
    update_settings,
    validate_dataset,
)
from shiftlab.datagen import CorpusSpec, corpus_similarity, generate_corpus
from shiftlab.diagnostics import (
    measure_gaps,
    omega1,
    omega2_hard,
    omega2_smooth,
    sample_diagnostics,
    sign_statistics,
)
from shiftlab.objectives import (
    ScheduleSpec,
    alpha_dpo_loss,
    dpo_loss,
    dpo_shift_loss,
    f_value,
    objective_gradient,
)
from shiftlab.policy import FrozenPolicy, LogLinearPolicy, TabularPolicy, finite_diff_grad

__version__ = "0.1.0"

__all__ = [
    "TokenSeq",
    "PreferenceTriple",
    "Settings",
    "get_settings",
    "update_settings",
    "reset_settings",
    "stable_sigmoid",
    "neg_log_sigmoid",
    "validate_dataset",
    "TabularPolicy",
    "LogLinearPolicy",
    "FrozenPolicy",
    "finite_diff_grad",
    "ScheduleSpec",
    "f_value",
    "dpo_loss",
    "dpo_shift_loss",
    "alpha_dpo_loss",
    "objective_gradient",
    "omega1",
    "omega2_hard",
    "omega2_smooth",
    "sample_diagnostics",
    "sign_statistics",
    "measure_gaps",
    "CorpusSpec",
    "generate_corpus",
    "corpus_similarity",
]
