"""
Command-line surface.

Usage:
    shiftlab gen-data --out data/ --set data.corpus.similarity=0.9
    shiftlab train-sft --out runs/sft --set data.train_path=data/train.jsonl --set data.test_path=data/test.jsonl
    shiftlab train-po --out runs/f095 --f 0.95 --set policy.reference_checkpoint=runs/sft/checkpoints/sft.ckpt
    shiftlab diagnose --out runs/diag --eta-grid 1e-2,1e-3,1e-4
    shiftlab sweep --out runs/sweep --f-grid 0.55,0.75,0.9,0.95,1.0
    shiftlab report runs/f095

Exit codes: 0 success, 2 usage, 3 I/O, 4 numeric or policy collapse.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from ..core.errors import DataIOError, DomainError, NumericError, UsageError
from ..core.settings import get_settings, update_settings
from ..datagen.corpus import corpus_similarity, generate_corpus, write_corpus
from ..diagnostics.gaps import gap_order, measure_gaps
from ..diagnostics.records import dataset_diagnostics, recommend_shift_direction, sign_statistics
from ..diagnostics.targets import omega1
from ..experiment.config import RunConfig, apply_overrides, load_config, with_fixed_f
from ..experiment.rundir import write_diagnostics_dir, write_sft_dir
from ..experiment.runner import load_corpora, resolve_reference, run_experiment
from ..experiment.sweep import DEFAULT_F_VALUES, DEFAULT_LINEAR_LAMBDA_MINS, extend_near_one, sweep
from ..experiment.training import fit_sft
from ..objectives.schedule import ScheduleSpec
from ..policy.checkpoint import load_checkpoint
from .report import render_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

VERBS = ("gen-data", "train-sft", "train-po", "diagnose", "sweep", "report")
DEFAULT_DIAGNOSE_F_VALUES = (0.55, 0.75, 0.95)
DEFAULT_ETA_GRID = (1e-2, 1e-3, 1e-4)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shiftlab", description="DPO / DPO-Shift desk-scale laboratory")
    parser.add_argument("verb", choices=VERBS)
    parser.add_argument("path", nargs="?", help="directory or dataset to report on (report only)")
    parser.add_argument("--config", help="run configuration JSON")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="top-level seed for data, initialization and shuffling")
    parser.add_argument("--f", type=float, help="fixed shift coefficient (schedule.lambda_min, fixed strategy)")
    parser.add_argument("--f-grid", type=_float_list, help="comma list of f values (diagnose, sweep)")
    parser.add_argument("--eta-grid", type=_float_list, help="comma list of step sizes (diagnose)")
    parser.add_argument("--alpha-grid", type=_float_list, default=[], help="alpha-DPO weights (sweep)")
    parser.add_argument("--linear", action="store_true", help="add linear schedule variants (sweep)")
    parser.add_argument("--near-one", action="store_true", help="add f = 0.96 .. 0.99 to the f grid (sweep)")
    parser.add_argument("--split", choices=("train", "test"), default="test", help="records used by diagnose")
    parser.add_argument("--policy", help="checkpoint of the policy at theta_t (diagnose); the reference by default")
    parser.add_argument("--coefficients", choices=("shared", "independent"), default="shared")
    parser.add_argument("--workers", type=int, help="threads for per-sample maps")
    parser.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"))
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = apply_overrides(load_config(args.config), args.overrides)
    updates = {}
    if args.seed is not None:
        if args.seed < 0:
            raise UsageError(f"--seed must be non-negative, got {args.seed}")
        corpus = config.data.corpus.model_copy(update={"seed": args.seed})
        updates["seed"] = args.seed
        updates["data"] = config.data.model_copy(update={"corpus": corpus})
    if args.out:
        updates["output_dir"] = args.out
    if updates:
        config = config.model_copy(update=updates)
    if args.f is not None:
        if not args.f > 0:
            raise UsageError(f"--f must be positive, got {args.f}")
        config = with_fixed_f(config, args.f)
    # model_copy skips validation, so re-check the shortcut flags
    try:
        return RunConfig.model_validate(config.model_dump())
    except ValidationError as e:
        raise UsageError(f"invalid configuration: {e}") from e


def _gen_data(config: RunConfig) -> None:
    out = Path(config.output_dir)
    spec = config.data.corpus
    for split_spec in (spec.for_split("train", spec.num_prompts), spec.for_split("test", config.data.test_prompts)):
        records = generate_corpus(split_spec)
        path = write_corpus(out, split_spec, records)
        print(f"{split_spec.split}: {len(records)} records -> {path} (similarity {corpus_similarity(records):.4f})")


def _train_sft(config: RunConfig) -> None:
    train, test = load_corpora(config)
    sft = fit_sft(config, train)
    checkpoint = write_sft_dir(config.output_dir, config, sft)
    print(f"SFT checkpoint: {checkpoint}")
    print(f"held-out omega1: {omega1(sft.policy, test):.6f}")


def _train_po(config: RunConfig) -> None:
    _, summary = run_experiment(config)
    print(summary.model_dump_json(indent=2))


def _diagnose(config: RunConfig, args: argparse.Namespace) -> None:
    train, test = load_corpora(config)
    out = Path(config.output_dir)
    ref, _ = resolve_reference(config, train, out)
    policy = load_checkpoint(args.policy) if args.policy else ref.thaw()
    dataset = test if args.split == "test" else train
    f_values = [args.f] if args.f is not None else (args.f_grid or list(DEFAULT_DIAGNOSE_F_VALUES))
    etas = args.eta_grid or list(DEFAULT_ETA_GRID)
    beta, gamma = config.objective.beta, config.diagnostics.gamma

    records = []
    reports = []
    for f in f_values:
        records.extend(dataset_diagnostics(policy, ref, dataset, f, gamma, config.diagnostics.eta, beta=beta))
        for eta in etas:
            reports.append(measure_gaps(policy, ref, dataset, beta, f, gamma, eta, coefficients=args.coefficients))
    write_diagnostics_dir(out, records, reports, config)

    for f in f_values:
        stats = sign_statistics([r for r in records if r.f == f])
        order = gap_order([r for r in reports if r.f == f])
        print(
            f"f={f:g}: u1>0 {stats.frac_u1_positive:.3f}, u2<0 {stats.frac_u2_negative:.3f}, "
            f"residual order g1 {order.slope1:.3f}, g2 {order.slope2:.3f}, "
            f"suggested side of 1: {recommend_shift_direction(stats)}"
        )


def _sweep(config: RunConfig, args: argparse.Namespace) -> None:
    f_values = args.f_grid or list(DEFAULT_F_VALUES)
    if args.near_one:
        f_values = extend_near_one(f_values)
    variants: List[ScheduleSpec] = []
    if args.linear:
        for lam in DEFAULT_LINEAR_LAMBDA_MINS:
            variants.append(ScheduleSpec(strategy="linear_increase", lambda_min=lam, lambda_max=1.0))
            variants.append(ScheduleSpec(strategy="linear_decrease", lambda_min=lam, lambda_max=1.0))
    report = sweep(config, f_values, variants, args.alpha_grid)
    print(report.table.to_string(index=False))
    trend = report.trend()
    print(f"rho(f, reward_accuracy) = {trend.rho_accuracy:.3f}; rho(f, omega1) = {trend.rho_omega1:.3f}")


def _dispatch(args: argparse.Namespace) -> None:
    if args.verb == "report":
        if not args.path:
            raise UsageError("report needs a path")
        print(render_report(Path(args.path), get_settings().report))
        return
    if args.path:
        raise UsageError(f"unexpected positional argument {args.path!r} for {args.verb}")
    config = resolve_config(args)
    if args.verb == "gen-data":
        _gen_data(config)
    elif args.verb == "train-sft":
        _train_sft(config)
    elif args.verb == "train-po":
        _train_po(config)
    elif args.verb == "diagnose":
        _diagnose(config, args)
    elif args.verb == "sweep":
        _sweep(config, args)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv`` and run one verb.

    Returns:
        Exit status: 0 success, 2 usage, 3 I/O, 4 numeric or collapse
    """
    try:
        args = build_parser().parse_args(list(sys.argv[1:] if argv is None else argv))
        if args.workers is not None:
            if args.workers < 1:
                raise UsageError(f"--workers must be at least 1, got {args.workers}")
            update_settings(workers=args.workers)
        level = args.log_level or get_settings().runtime.log_level
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        logging.getLogger().setLevel(level)
        _dispatch(args)
        return EXIT_OK
    except (UsageError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataIOError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except NumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run_command())
