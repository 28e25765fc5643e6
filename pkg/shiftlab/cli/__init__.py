from .histogram import Histogram, emit_histogram
from .main import build_parser, main, run_command
from .report import render_report

__all__ = ["run_command", "main", "build_parser", "emit_histogram", "Histogram", "render_report"]
