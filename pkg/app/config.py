"""
Runtime configuration read from the environment.

Every getter falls back to a default when the variable is unset, so the
package works without any configuration. Command-line flags override
these values.
"""
import logging
import os
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_workers() -> int:
    """
    Returns:
        default number of labeling workers (GRAPHLET_THREADS, default 1)
    """
    try:
        return max(1, int(os.getenv("GRAPHLET_THREADS", "1")))
    except ValueError:
        return 1


def get_log_level() -> str:
    """
    Returns:
        logging level name (GRAPHLET_LOG_LEVEL, default WARNING)
    """
    return os.getenv("GRAPHLET_LOG_LEVEL", "WARNING").upper()


def get_report_db_path() -> str:
    """
    Returns:
        path of the SQLite benchmark report file (GRAPHLET_REPORT_DB)
    """
    return os.getenv("GRAPHLET_REPORT_DB", "reports.db")


def get_service_paths():
    """
    Edge-list and index file loaded by the HTTP service at start-up.

    Returns:
        tuple: (graph path or None, index path or None)
    """
    return os.getenv("GRAPHLET_GRAPH"), os.getenv("GRAPHLET_INDEX")


def get_service_address():
    """
    Returns:
        tuple: (host, port) the HTTP service binds to
    """
    host = os.getenv("GRAPHLET_SERVICE_HOST", "127.0.0.1")
    port = int(os.getenv("GRAPHLET_SERVICE_PORT", "8080"))
    return host, port


def configure_logging(level=None):
    """
    Install one stderr handler on the root logger.

    Args:
        level (str or int): Overrides GRAPHLET_LOG_LEVEL when given.
    """
    level = level if level is not None else get_log_level()
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_graphlet_search", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._graphlet_search = True
    root.addHandler(handler)
    root.setLevel(level)
