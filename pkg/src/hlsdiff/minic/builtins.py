"""Builtin functions known to the MiniC front end.

Each entry maps a name to ``(min_args, max_args, compat_code)``. A
``compat_code`` of ``None`` means the builtin is legal in hardware mode.
"""

from __future__ import annotations

BUILTINS = {
    # hardware-legal
    "len": (1, 2, None),
    "push": (2, 2, None),
    "pop": (1, 1, None),
    "abs": (1, 1, None),
    "min": (2, 2, None),
    "max": (2, 2, None),
    # software-only
    "alloc": (1, 2, "E_DYNAMIC_ALLOC"),
    "free": (1, 1, "E_DYNAMIC_FREE"),
    "resize": (2, 2, "E_DYNAMIC_RESIZE"),
    "print": (1, 8, "E_CONSOLE_IO"),
    "scan": (0, 0, "E_CONSOLE_IO"),
    "rand": (0, 0, "E_NONDETERMINISTIC_BUILTIN"),
    "time": (0, 0, "E_NONDETERMINISTIC_BUILTIN"),
    "exit": (1, 1, "E_SYSTEM_CALL"),
}

# Libraries a hardware flow can include; anything else is a software header.
HW_IMPORTS = frozenset({"ap_int", "ap_fixed", "hls_stream", "hls_vector", "hls_math"})


def is_builtin(name: str) -> bool:
    return name in BUILTINS
