"""
Logging configuration for mpdetect.
"""
import logging
import logging.handlers
import os
import traceback
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DETAILED_LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'

_debug_mode = False


def configure_logging(debug: bool = False, log_file: Optional[str] = None) -> logging.Logger:
    """Configure the ``mpdetect`` logger.

    Args:
        debug: Enable debug logging on the console.
        log_file: Path to a log file. Falls back to ``MPDETECT_LOG_FILE``;
            no file logging when neither is set.

    Returns:
        The configured package logger.
    """
    global _debug_mode
    _debug_mode = debug

    logger = logging.getLogger('mpdetect')
    logger.setLevel(logging.DEBUG if debug else logging.INFO)

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    formatter = logging.Formatter(DETAILED_LOG_FORMAT if debug else LOG_FORMAT)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.DEBUG if debug else logging.INFO)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_file = log_file or os.environ.get('MPDETECT_LOG_FILE')
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=10*1024*1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(DETAILED_LOG_FORMAT))
        logger.addHandler(file_handler)

    logger.propagate = False
    logger.debug(f'Logging configured. Debug mode: {debug}, Log file: {log_file or "none"}')
    return logger


def is_debug_mode() -> bool:
    """Return True when debug logging was requested."""
    return _debug_mode


def log_exception(logger: logging.Logger, exception: Exception, message: str = "Error:") -> None:
    """
    Log an exception, with its traceback in debug mode.

    Args:
        logger: Logger to use.
        exception: Exception to log.
        message: Prefix for the log line.
    """
    logger.error(f"{message} {exception}")
    if is_debug_mode():
        logger.debug(traceback.format_exc())


def log_performance(logger: logging.Logger, operation: str, seconds: float) -> None:
    """
    Log how long an operation took.

    Args:
        logger: Logger to use.
        operation: Name of the operation.
        seconds: Duration in seconds.
    """
    if seconds > 60:
        logger.info(f"Performance: {operation} took {seconds:.1f} s")
    else:
        logger.debug(f"Performance: {operation} took {seconds:.3f} s")
