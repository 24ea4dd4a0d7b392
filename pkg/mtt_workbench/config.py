"""
Runtime settings read from the environment (optionally from a .env file)
"""
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv

from .errors import ConfigError

# ==========================================================
# 🧭 Load environment variables (repo-root .env)
# ==========================================================
BASE_DIR = Path(__file__).resolve().parent
ENV_PATH = BASE_DIR.parent / ".env"

DEFAULT_BOUND = 6
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_WORKERS = 1


@dataclass(frozen=True)
class Settings:
    bound: int = DEFAULT_BOUND
    log_level: str = DEFAULT_LOG_LEVEL
    workers: int = DEFAULT_WORKERS


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


def load_settings(env_path: Optional[Union[str, Path]] = None) -> Settings:
    """
    Load settings, reading the .env file first when it exists.

    Variables already present in the process environment win over the file.

    Args:
        env_path: Explicit .env location (defaults to the repository root)

    Returns:
        Settings instance

    Raises:
        ConfigError: If a numeric variable does not hold a positive integer
            or the log level is unknown
    """
    path = Path(env_path) if env_path is not None else ENV_PATH
    if path.exists():
        load_dotenv(path, override=False)

    level = (os.getenv("MTT_WORKBENCH_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"MTT_WORKBENCH_LOG_LEVEL is not a logging level: {level!r}")
    return Settings(
        bound=_int_env("MTT_WORKBENCH_BOUND", DEFAULT_BOUND),
        log_level=level,
        workers=_int_env("MTT_WORKBENCH_WORKERS", DEFAULT_WORKERS),
    )
