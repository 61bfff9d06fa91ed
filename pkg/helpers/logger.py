"""Logging configuration using Loguru."""

from pathlib import Path
import sys

from loguru import logger

from wavetrack.core.config import config

# Global logging configuration for loguru
logger.remove()
logger_format = (
    # Put message first so tags for structured logging come first
    "<level>{time}</level> {message} | <level>{level}</level> "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan>"
)
logger.add(sys.stderr, catch=True, format=logger_format, level=config.log_level)
logger = logger.opt(colors=True)


def add_run_log(path: Path | str, level: str = "DEBUG") -> int:
    """Mirror log output into a plain-text file next to a run's artifacts.

    Returns the sink id so the caller can remove it with ``logger.remove(id)``.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return logger.add(path, format=logger_format, level=level, colorize=False)


__all__ = ["add_run_log", "logger"]
