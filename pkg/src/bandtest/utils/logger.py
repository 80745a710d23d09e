import os
import sys
from typing import Optional

from loguru import logger

LOG_LEVEL_ENV = "BANDTEST_LOG_LEVEL"
LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")
LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
    "<bold><level>{message}</level></bold>"
)
UNKNOWN_LEVEL_ERROR = "Unknown log level {!r}; use one of {}"


def configure_logger(level: Optional[str] = None) -> str:
    """
    Replace every loguru sink with a single colorized stderr sink.

    Args:
        level: Level name; BANDTEST_LOG_LEVEL or INFO when None

    Returns:
        The level that was installed

    Raises:
        ValueError: If the level name is not a loguru level
    """
    resolved = (level or os.getenv(LOG_LEVEL_ENV) or "INFO").strip().upper()
    if resolved not in LOG_LEVELS:
        raise ValueError(UNKNOWN_LEVEL_ERROR.format(resolved, ", ".join(LOG_LEVELS)))
    logger.remove()
    logger.add(sys.stderr, format=LOG_FORMAT, colorize=True, level=resolved)
    return resolved


try:
    configure_logger()
except ValueError as e:
    configure_logger("INFO")
    logger.warning(f"Ignoring {LOG_LEVEL_ENV}: {e}")
