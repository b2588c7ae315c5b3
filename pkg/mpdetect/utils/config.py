"""
Configuration utilities for the mpdetect application.
"""
import os
from pathlib import Path
from typing import Optional, Dict, Any

import appdirs
import dotenv

from ..exceptions import ConfigError

# Environment variables understood by the harness and the type they map to.
ENV_KEYS = {
    "MPDETECT_WORKERS": ("workers", int),
    "MPDETECT_OUTPUT": ("output", str),
    "MPDETECT_SEED": ("seed", int),
}


def get_config_dir() -> Path:
    """
    Get the configuration directory for the application.

    Returns:
        Path to the configuration directory.
    """
    config_dir = Path(appdirs.user_config_dir("mpdetect"))
    config_dir.mkdir(parents=True, exist_ok=True)
    return config_dir


def get_env_path() -> Optional[Path]:
    """
    Find the .env file to read defaults from.

    A .env in the current working directory wins over one in the config
    directory.

    Returns:
        Path to the .env file, or None if there is none.
    """
    local_env_path = Path.cwd() / ".env"
    if local_env_path.exists():
        return local_env_path

    central_env_path = get_config_dir() / ".env"
    if central_env_path.exists():
        return central_env_path

    return None


def load_env_defaults(environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    """
    Collect experiment defaults from the .env file and the process environment.

    Process environment variables override values from the .env file.

    Args:
        environ: Mapping used instead of ``os.environ`` (for tests).

    Returns:
        Dictionary of experiment config keys to typed values.
    """
    env: Dict[str, Optional[str]] = {}
    env_path = get_env_path()
    if env_path is not None:
        env.update(dotenv.dotenv_values(env_path))

    environ = os.environ if environ is None else environ
    for key in ENV_KEYS:
        if key in environ:
            env[key] = environ[key]

    defaults: Dict[str, Any] = {}
    for key, (field, cast) in ENV_KEYS.items():
        value = env.get(key)
        if value is None or value == "":
            continue
        try:
            defaults[field] = cast(value)
        except ValueError:
            raise ConfigError(f"Environment variable {key}={value!r} is not a valid {cast.__name__}")
    return defaults


__all__ = [
    'get_config_dir',
    'get_env_path',
    'load_env_defaults',
]
