"""
Read-only, human-readable views of corpus, run, diagnostics and sweep directories.
"""

import json
import logging
from pathlib import Path
from typing import List

from ..core.dataset_io import read_dataset
from ..core.errors import DataIOError
from ..core.settings import ReportConfig
from ..core.validation import validate_dataset
from ..datagen.corpus import SPEC_FILE, corpus_similarity, load_corpus_specs
from ..diagnostics.gaps import gap_order
from ..diagnostics.records import DiagnosticsRecord, recommend_shift_direction, sign_statistics
from ..experiment.rundir import (
    DIAGNOSTICS_FILE,
    GAPS_FILE,
    RECORDS_FILE,
    SUMMARY_FILE,
    SWEEP_SUMMARY_FILE,
    read_gap_reports,
    read_summary,
    read_table,
)
from ..experiment.sweep import trend_of
from .histogram import emit_histogram

logger = logging.getLogger(__name__)


def _section(title: str, body: str) -> str:
    return f"== {title} ==\n{body}\n"


def _read_diagnostics(path: Path) -> List[DiagnosticsRecord]:
    try:
        return [DiagnosticsRecord.model_validate_json(line) for line in path.read_text(encoding="utf-8").splitlines() if line]
    except ValueError as e:
        raise DataIOError(path, f"unreadable diagnostics: {e}") from e


def _sign_section(path: Path) -> str:
    records = _read_diagnostics(path)
    if not records:
        return ""
    parts = []
    for f in sorted({r.f for r in records}):
        stats = sign_statistics([r for r in records if r.f == f])
        parts.append(
            f"f={f:g}: n={stats.count}  u1>0: {stats.frac_u1_positive:.3f}  u2<0: {stats.frac_u2_negative:.3f}  "
            f"mean u1: {stats.mean_u1:.4g}  mean u2: {stats.mean_u2:.4g}  "
            f"suggested side of 1: {recommend_shift_direction(stats)}"
        )
    return _section("sign statistics", "\n".join(parts))


def render_corpus(directory: Path) -> str:
    specs = load_corpus_specs(directory)
    out = []
    files = sorted(directory.glob("*.jsonl"))
    if not files:
        raise DataIOError(directory, "no dataset files found")
    for path in files:
        records = read_dataset(path)
        split = path.stem
        spec = specs.get(split)
        if spec is not None:
            vocab = spec.vocab_size
        elif records:
            vocab = 1 + max(max(r.prompt.tokens + r.chosen.tokens + r.rejected.tokens, default=0) for r in records)
        else:
            raise DataIOError(path, f"empty dataset and no {SPEC_FILE} to take the vocabulary size from")
        report = validate_dataset(records, vocab)
        lines = [
            f"records: {report.record_count}",
            f"vocab_size: {vocab}",
            f"validation: {'passed' if report.passed else f'{len(report.violations)} violations'}",
            f"corpus_similarity: {corpus_similarity(records):.6f}" if records else "corpus_similarity: n/a",
        ]
        if spec is not None:
            lines.append(f"spec: similarity={spec.similarity:g} seed={spec.seed} response_len={spec.response_len}")
        out.append(_section(f"corpus {split}", "\n".join(lines)))
    return "\n".join(out)


def render_run(directory: Path, report_config: ReportConfig) -> str:
    summary = read_summary(directory)
    out = [_section("summary", "\n".join(f"{k}: {v}" for k, v in summary.model_dump().items()))]
    records_path = directory / RECORDS_FILE
    if records_path.is_file():
        records = read_table(records_path)
        for column, value_range in (
            ("logp_w", report_config.logp_range),
            ("logp_l", report_config.logp_range),
            ("margin", report_config.margin_range),
        ):
            histogram = emit_histogram(records[column].to_numpy(), report_config.bin_count, value_range)
            out.append(_section(f"histogram {column}", histogram.to_string()))
    if (directory / DIAGNOSTICS_FILE).is_file():
        out.append(_sign_section(directory / DIAGNOSTICS_FILE))
    return "\n".join(out)


def render_diagnostics(directory: Path) -> str:
    reports = read_gap_reports(directory)
    out = []
    rows = [
        f"f={r.f:g} eta={r.eta:g}: g1={r.g1_measured:.4e} pred={r.g1_predicted:.4e} res={r.residual1:.3e} | "
        f"g2={r.g2_measured:.4e} pred={r.g2_predicted:.4e} res={r.residual2:.3e}"
        for r in reports
    ]
    out.append(_section("gap reports", "\n".join(rows)))
    orders = []
    for f in sorted({r.f for r in reports}):
        order = gap_order([r for r in reports if r.f == f])
        orders.append(f"f={f:g}: residual1 ~ eta^{order.slope1:.3f}, residual2 ~ eta^{order.slope2:.3f}")
    out.append(_section("residual order", "\n".join(orders)))
    if (directory / DIAGNOSTICS_FILE).is_file():
        out.append(_sign_section(directory / DIAGNOSTICS_FILE))
    return "\n".join(out)


def render_sweep(directory: Path) -> str:
    table = read_table(directory / SWEEP_SUMMARY_FILE)
    trend = trend_of(table)
    body = json.dumps(trend.model_dump(), indent=2)
    return "\n".join([_section("sweep summary", table.to_string(index=False)), _section("trend", body)])


def render_report(path: Path, report_config: ReportConfig) -> str:
    """
    Render whatever ``path`` holds.

    Raises:
        DataIOError: If the path does not exist or holds none of the known layouts
    """
    path = Path(path)
    if path.is_file() and path.suffix == ".jsonl":
        records = read_dataset(path)
        return _section(
            f"dataset {path.name}",
            f"records: {len(records)}\ncorpus_similarity: {corpus_similarity(records):.6f}",
        )
    if not path.is_dir():
        raise DataIOError(path, "no such run, sweep, diagnostics or corpus directory")
    if (path / SWEEP_SUMMARY_FILE).is_file():
        return render_sweep(path)
    if (path / SUMMARY_FILE).is_file():
        return render_run(path, report_config)
    if (path / GAPS_FILE).is_file():
        return render_diagnostics(path)
    if (path / SPEC_FILE).is_file() or any(path.glob("*.jsonl")):
        return render_corpus(path)
    raise DataIOError(path, "not a run, sweep, diagnostics or corpus directory")
