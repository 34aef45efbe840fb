# decode_energy/extensions.py

from cachelib import NullCache, SimpleCache
from rich.console import Console

# Cross-validation result cache. Replaced by init_cache() from the app factory.
cache = SimpleCache(threshold=4096, default_timeout=0)


def init_cache(config):
    global cache
    if config.CACHE_TYPE == "NullCache":
        cache = NullCache()
    else:
        cache = SimpleCache(threshold=config.CACHE_THRESHOLD, default_timeout=0)
    return cache


def get_cache():
    return cache


def make_console(config, stderr=False):
    """Console with a fixed width and no colour codes when not attached to a terminal."""
    return Console(
        width=config.CONSOLE_WIDTH,
        stderr=stderr,
        highlight=False,
        soft_wrap=False,
    )
