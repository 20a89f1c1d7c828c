# verify_logger.py

from contextlib import nullcontext
from enum import IntEnum
import os
from pathlib import Path
import sys
from typing import Any, Callable, ContextManager, Optional, TextIO, Tuple, Union

from filelock import FileLock

from PolyAchieve.bounds import Status, Verdict

# One logger per process; catalog workers rebuild theirs from get_worker_init_info().
_logger_instance = None

STATUS_MARKS = {
    Status.MAKER_WINS: "✅",
    Status.BREAKER_WINS: "✅",
    Status.UNKNOWN: "🔴",
    Status.ABORTED: "⚠️ ",
}


class LogLevel(IntEnum):
    DEBUG = 10
    INFO = 20
    WARNING = 30
    ERROR = 40


def initialize_file_logger_for_worker(log_file_path_str: str, log_level_name: str):
    global _logger_instance
    _logger_instance = VerifyLogger(Path(log_file_path_str), log_level=LogLevel[log_level_name.upper()])


def _open_target(output: Union[str, Path, TextIO, None]) -> Tuple[TextIO, ContextManager]:
    """The handle to write to and the lock guarding it. Files are shared between workers."""
    if isinstance(output, (str, Path)):
        log_file = Path(output)
        return log_file.open("a", encoding="utf-8"), FileLock(log_file.with_suffix(".lock"))
    if hasattr(output, "write") and hasattr(output, "flush"):
        return output, nullcontext()
    if output is None:
        return open(os.devnull, "w", encoding="utf-8"), nullcontext()
    raise ValueError(f"❌ A VerifyLogger writes to a path or a text stream, not {type(output).__name__}.")


class VerifyLogger:
    """
    Writes verification reports: plain lines, section headers and verdicts.

    The output is a text stream, a file path (appended under a FileLock so catalog
    workers can share it) or None to discard everything.
    """

    def __init__(self, output: Union[str, Path, TextIO, None], log_level: LogLevel = LogLevel.INFO):
        self.output_target = output
        self.level = log_level
        self.is_file_based = isinstance(output, (str, Path))
        self.handle, self.lock = _open_target(output)

    def log(self, message: str, level: LogLevel = LogLevel.INFO):
        if level < self.level:
            return
        with self.lock:
            self.handle.write(f"{message}\n")
            self.handle.flush()

    def debug(self, message: str):
        self.log(message, level=LogLevel.DEBUG)

    def info(self, message: str):
        self.log(message, level=LogLevel.INFO)

    def warning(self, message: str):
        self.log(f"⚠️  WARNING: {message}", level=LogLevel.WARNING)

    def error(self, message: str):
        self.log(f"❌ ERROR: {message}", level=LogLevel.ERROR)

    def section(self, title: str):
        self.log(f"🔵 {title}")

    def verdict(self, v: Verdict, indent: str = ""):
        """One verdict line, marked by whether it proves anything."""
        self.log(f"{indent}{STATUS_MARKS[v.status]} {v}")

    def get_worker_init_info(self) -> Optional[Tuple[Callable, Tuple[Any, ...]]]:
        """Initializer and arguments for worker processes, only for file-based loggers."""
        if self.is_file_based:
            return initialize_file_logger_for_worker, (str(self.output_target), self.level.name)
        return None


def setup_logger(logger: VerifyLogger):
    global _logger_instance
    _logger_instance = logger


def get_logger() -> VerifyLogger:
    """The process logger, a stdout INFO logger unless one was installed."""
    global _logger_instance
    if _logger_instance is None:
        _logger_instance = VerifyLogger(sys.stdout, log_level=LogLevel.INFO)
    return _logger_instance
