"""Tunable limits, overridable through environment variables.

PUISEUXPATH_REFINE_CAP   cap on interval refinement rounds per certification
PUISEUXPATH_DEGREE_CAP   per-variable degree cap during exact elimination
"""

import os


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value > 0 else default


def refine_cap() -> int:
    """Maximum interval-refinement rounds before giving up."""
    return _env_int("PUISEUXPATH_REFINE_CAP", 256)


def degree_cap() -> int:
    """Per-variable degree cap for exact coordinate elimination."""
    return _env_int("PUISEUXPATH_DEGREE_CAP", 64)
