from .app import build_parser, dispatch, main
from .comparison import build_comparison, emit_comparison

__all__ = ["build_comparison", "build_parser", "dispatch", "emit_comparison", "main"]
