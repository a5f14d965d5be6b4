import logging
import sys

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

DEFAULT_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def get_logger(name, level=logging.INFO, log_format=DEFAULT_FORMAT,
               stream=sys.stderr):
    """
    Get a named logger with a single stream handler attached.

    Reports may be written to stdout, so log records go to stderr by default.

    :param name: Logger name, usually __name__.
    :param level: Logging level. Default logging.INFO.
    :param log_format: Format string for the handler.
    :param stream: Stream the handler writes to.
    :return: logging.Logger
    """

    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not any(getattr(h, "_repvote", False) for h in logger.handlers):
        sh = logging.StreamHandler(stream=stream)
        sh.setFormatter(logging.Formatter(log_format))
        sh._repvote = True
        logger.addHandler(sh)
        logger.propagate = False

    return logger


def set_level(level):
    """
    Change the level of every repvote logger created so far.

    :param level: logging level (int or name)
    """

    for name in list(logging.root.manager.loggerDict):
        if name == "repvote" or name.startswith("repvote."):
            logging.getLogger(name).setLevel(level)
