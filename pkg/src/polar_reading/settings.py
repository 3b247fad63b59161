"""
Environment-driven settings for polar-reading.

Values are read on every call so that tests can change them with ``monkeypatch.setenv``.
"""

import logging
import os

from .errors import CapacityExceededError

logger = logging.getLogger(__name__)

# -----------------------------------------------------------------------------
# CONFIGURATION
# -----------------------------------------------------------------------------
# Worker thread cap for Monte Carlo trials and probe grid evaluation
THREADS_ENV = "POLAR_READING_THREADS"
# Largest block length served by exact (brute-force) synthesized channels
MAX_EXACT_N_ENV = "POLAR_READING_MAX_EXACT_N"
# Largest block length for full 2^N source probability tables
MAX_TABLE_N_ENV = "POLAR_READING_MAX_TABLE_N"
# Largest polar transform level n (N = 2^n)
MAX_TRANSFORM_LEVEL_ENV = "POLAR_READING_MAX_TRANSFORM_LEVEL"
# Default logging level for the command-line front end
LOG_LEVEL_ENV = "POLAR_READING_LOG_LEVEL"

DEFAULT_MAX_EXACT_N = 8
DEFAULT_MAX_TABLE_N = 16
DEFAULT_MAX_TRANSFORM_LEVEL = 12


def _int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}; using {default}")
        return default


def worker_threads() -> int:
    return max(1, _int_from_env(THREADS_ENV, os.cpu_count() or 1))


def max_exact_n() -> int:
    return _int_from_env(MAX_EXACT_N_ENV, DEFAULT_MAX_EXACT_N)


def max_table_n() -> int:
    return _int_from_env(MAX_TABLE_N_ENV, DEFAULT_MAX_TABLE_N)


def max_transform_level() -> int:
    return _int_from_env(MAX_TRANSFORM_LEVEL_ENV, DEFAULT_MAX_TRANSFORM_LEVEL)


def log_level() -> str:
    return os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()


def require_exact(block_length: int) -> None:
    """Raise when ``block_length`` exceeds the exact synthesized-channel cap."""
    cap = max_exact_n()
    if block_length > cap:
        raise CapacityExceededError(
            f"N={block_length} exceeds the exact synthesized-channel cap N<={cap}; "
            f"raise {MAX_EXACT_N_ENV} to allow it (cost grows as N*2^N operators of "
            f"dimension 2^N)"
        )


def require_table(block_length: int) -> None:
    """Raise when a full 2^N source table would exceed the table cap."""
    cap = max_table_n()
    if block_length > cap:
        raise CapacityExceededError(
            f"N={block_length} exceeds the source-table cap N<={cap}; raise {MAX_TABLE_N_ENV}"
        )
