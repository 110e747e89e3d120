"""
Logging Utility

Standardized logging across zeta-qvae modules.

Why Centralized Logging?
- One console format for the CLI and the experiment scripts
- Easy to toggle debug mode
- Every run directory gets a DEBUG-level run.log
- Library modules only ever call logging.getLogger(__name__)
"""

import logging
from pathlib import Path
from typing import Optional, Union

from rich.console import Console
from rich.logging import RichHandler

FILE_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def setup_logger(
    name: Optional[str] = None,
    log_file: Optional[Union[str, Path]] = None,
    level: int = logging.INFO,
) -> logging.Logger:
    """
    Create or extend a configured logger instance.

    Calling this again for the same logger never adds a second console
    handler or a second handler for the same file.

    Args:
        name: Logger name (None configures the root logger)
        log_file: Optional path to a log file
        level: Console logging level (DEBUG, INFO, WARNING, ERROR)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG if log_file else level)

    console = next((h for h in logger.handlers if isinstance(h, RichHandler)), None)
    if console is None:
        console = RichHandler(
            console=Console(stderr=True),
            show_time=False,
            show_path=False,
            markup=False,
        )
        console.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(console)
    console.setLevel(level)

    if log_file:
        log_path = Path(log_file).resolve()
        already = any(
            isinstance(h, logging.FileHandler) and Path(h.baseFilename) == log_path
            for h in logger.handlers
        )
        if not already:
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_path, encoding="utf-8")
            file_handler.setLevel(logging.DEBUG)  # Always log DEBUG to file
            file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
            logger.addHandler(file_handler)

    return logger


def detach_file(logger: logging.Logger, log_file: Union[str, Path]) -> None:
    """Close and remove the handler writing to `log_file`."""
    log_path = Path(log_file).resolve()
    for handler in list(logger.handlers):
        if isinstance(handler, logging.FileHandler) and Path(handler.baseFilename) == log_path:
            handler.close()
            logger.removeHandler(handler)
