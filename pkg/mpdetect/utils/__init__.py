"""
Utility functions for the mpdetect application.
"""

from .config import (
    get_config_dir,
    get_env_path,
    load_env_defaults,
)
from .logging_utils import configure_logging, log_exception, log_performance

__all__ = [
    'get_config_dir',
    'get_env_path',
    'load_env_defaults',
    'configure_logging',
    'log_exception',
    'log_performance',
]
