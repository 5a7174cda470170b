from __future__ import annotations

import logging
import sys

DEFAULT_LOG_LEVEL = logging.INFO
DEFAULT_LOG_FORMAT = "%(asctime)s [%(levelname)s]: %(message)s"

LOG_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


def _get_log_level(config: dict | None) -> int:
    if config is None:
        return DEFAULT_LOG_LEVEL

    return LOG_LEVELS.get(str(config.get("level")).upper(), DEFAULT_LOG_LEVEL)


def _get_handler(config: dict | None) -> logging.Handler:
    # Without a logfile we log to stderr; stdout may carry the CSV.
    if config is None or not config.get("logfile"):
        return logging.StreamHandler(sys.stderr)

    return logging.FileHandler(config["logfile"])


def set_logger(config: dict | None) -> None:
    loglevel = _get_log_level(config)
    handler = _get_handler(config)

    logging.basicConfig(
        level=loglevel,
        format=DEFAULT_LOG_FORMAT,
        handlers=[handler],
        force=True,
    )
