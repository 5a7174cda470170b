import logging

import pytest

from metaslab.log import set_logger


@pytest.fixture
def root_logger():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield root
    for h in root.handlers:
        h.close()
    root.handlers = handlers
    root.setLevel(level)


def test_default_stderr(root_logger):
    set_logger(None)

    assert root_logger.level == logging.INFO
    assert len(root_logger.handlers) == 1
    assert isinstance(root_logger.handlers[0], logging.StreamHandler)
    assert not isinstance(root_logger.handlers[0], logging.FileHandler)


def test_logfile_and_level(root_logger, tmp_path):
    logfile = tmp_path / "metaslab.log"
    set_logger({"level": "debug", "logfile": str(logfile)})

    assert root_logger.level == logging.DEBUG
    logging.debug("Dropped grid point 0.5")
    root_logger.handlers[0].flush()

    assert "[DEBUG]: Dropped grid point 0.5" in logfile.read_text()


def test_unknown_level(root_logger):
    set_logger({"level": "VERBOSE"})
    assert root_logger.level == logging.INFO
