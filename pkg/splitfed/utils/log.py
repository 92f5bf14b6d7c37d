import logging
from contextlib import contextmanager
from typing import Any, Dict, Iterator

from ..version import version

LOG_FORMAT = "%(asctime)s[%(levelname)-8s]: %(message)s"
DATE_FORMAT = '%m/%d/%Y %H:%M:%S'

BANNER = [r"           _ _ _    __        _ ",
          r" ___ _ __ | (_) |_ / _|___ __| |",
          r"(_-<| '_ \| | |  _|  _/ -_) _` |",
          r"/__/| .__/|_|_|\__|_| \___\__,_|",
          r"    |_|      v%-8s           "]


def setup_log(name: str, filename: str = None, stream: bool = True, mode: str = 'w', header: bool = True,
              level: int = logging.INFO) -> logging.Logger:
    """Sets up a new logger object

    Args:
        name: Name of new logger.
        filename: If given, name of file to write logs to.
        stream: If True, also log to stderr.
        mode: Open mode for log file (w/a).
        header: If True, immediately writes a splitfed banner into the log.
        level: Level of the logger; DEBUG shows train losses per local epoch.

    Returns:
        The new logger object
    """
    log = logging.getLogger(name)
    shutdown_log(name)
    log.setLevel(level)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
    handlers = []
    if filename is not None:
        handlers.append(logging.FileHandler(filename, mode=mode))
    if stream:
        handlers.append(logging.StreamHandler())
    for handler in handlers:
        handler.setFormatter(formatter)
        log.addHandler(handler)

    # records only go to the root logger if we have no handlers of our own
    log.propagate = not handlers

    if header:
        log.info('')
        for line in BANNER[:-1]:
            log.info(line)
        log.info(BANNER[-1] % version())
        log.info('  split federated learning over lossy links')
        log.info('')
    return log


def shutdown_log(name: str):
    """Closes and removes all handlers of a logger, so that log files are not kept open between experiments.

    Args:
        name: Name of logger to shut down.
    """
    log = logging.getLogger(name)
    for handler in log.handlers[:]:
        handler.close()
        log.removeHandler(handler)
    log.propagate = True


@contextmanager
def open_log(name: str, filename: str = None, **kwargs) -> Iterator[logging.Logger]:
    """Context manager around setup_log() and shutdown_log().

    Args:
        name: Name of logger.
        filename: If given, name of file to write logs to.
        **kwargs: Passed to setup_log().
    """
    log = setup_log(name, filename, **kwargs)
    try:
        yield log
    finally:
        shutdown_log(name)


def log_config(log: logging.Logger, values: Dict[str, Dict[str, Any]]):
    """Writes every section and key of a config into a log.

    Args:
        log: Logger to write to.
        values: Config values by section and key.
    """
    log.info('Configuration:')
    for section, keys in values.items():
        log.info('  [%s] %s', section, ', '.join('%s=%s' % (k, v) for k, v in keys.items() if v is not None))


__all__ = ['setup_log', 'shutdown_log', 'open_log', 'log_config', 'LOG_FORMAT']
