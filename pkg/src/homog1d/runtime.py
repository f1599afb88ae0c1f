"""Process-level knobs shared by the parallel pieces of the package."""

import os

from .errors import ConfigError

THREADS_ENV_VAR = "HOMOG1D_THREADS"


def worker_count() -> int:
    """Number of worker threads to use for sweeps and path simulation.

    Defaults to the machine's CPU count and is capped by the
    HOMOG1D_THREADS environment variable when that is set.  Results of
    every computation in this package are independent of the value; it
    only controls wall-clock time.
    """
    avail = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return avail
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(
            f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}"
        ) from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV_VAR} must be >= 1, got {n}")
    return min(n, avail)
