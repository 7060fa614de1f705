"""Command-line subcommands."""

from .common import add_shared_arguments, resolve_run_config, run_context
from .evaluate import cmd_eval
from .gradcheck import cmd_gradcheck
from .ingest import cmd_ingest
from .report import cmd_report
from .train import cmd_train

__all__ = [
    "add_shared_arguments",
    "resolve_run_config",
    "run_context",
    "cmd_ingest",
    "cmd_train",
    "cmd_eval",
    "cmd_report",
    "cmd_gradcheck",
]
