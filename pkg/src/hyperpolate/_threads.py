"""Thread-count resolution for parallel candidate evaluation.

The HYPERPOLATE_THREADS environment variable caps parallelism; results are
merged in canonical order, so the thread count never affects output.
"""

import os

ENV_VAR = "HYPERPOLATE_THREADS"


def thread_count(override=None):
    """Resolve the number of worker threads to use (>= 1)."""
    if override is not None:
        return max(1, int(override))
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
