"""Worker pool for independent solves, capped by HS_THREADS."""

from __future__ import annotations

import concurrent.futures
import os

from .errors import ConfigError


def thread_count() -> int:
    """Worker cap from HS_THREADS (default 1)."""
    raw = os.environ.get("HS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"HS_THREADS must be an integer, got {raw!r}")


def pool_map(fn, items):
    """Map preserving order; sequential unless HS_THREADS > 1."""
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
