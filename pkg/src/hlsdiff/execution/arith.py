"""Fixed-width integer and fixed-point coercions."""

from __future__ import annotations

import math

from ..minic.types import TypeSpec


def wrap_int(v: int, width: int, signed: bool) -> int:
    """Reduce ``v`` modulo ``2**width``; reinterpret as two's complement if signed."""
    m = v & ((1 << width) - 1)
    if signed and m >> (width - 1):
        m -= 1 << width
    return m


def wrap_to_width(v, t: TypeSpec):
    """Coerce ``v`` into the representable set of ``t`` by wrapping.

    Integer kinds wrap modulo ``2**W``. For fixed-point, fractional bits
    beyond ``W - I`` are truncated toward zero first, then the scaled
    integer wraps. Total for finite input.
    """
    if t.kind == "float":
        raise ValueError("wrap_to_width is undefined for float types")
    if t.kind == "fixed":
        scale = 1 << t.frac_bits
        raw = math.trunc(v * scale) if isinstance(v, float) else v * scale
        return wrap_int(raw, t.width, t.signed) / scale
    if isinstance(v, float):
        v = math.trunc(v)
    return wrap_int(v, t.width, t.signed)


def coerce(v, t: TypeSpec):
    """Store-time conversion. Returns ``(stored, tag)`` where ``tag`` names
    what was lost: ``''``, ``'wrap'``, ``'trunc'`` or ``'trunc+wrap'``."""
    if t.kind == "float":
        return float(v), ""
    if t.kind == "fixed":
        if isinstance(v, float) and not math.isfinite(v):
            return 0.0, "wrap"
        scale = 1 << t.frac_bits
        scaled = v * scale
        raw = math.trunc(scaled) if isinstance(scaled, float) else scaled
        wrapped = wrap_int(raw, t.width, t.signed)
        tags = []
        if raw != scaled:
            tags.append("trunc")
        if wrapped != raw:
            tags.append("wrap")
        return wrapped / scale, "+".join(tags)
    if isinstance(v, float):
        if not math.isfinite(v):
            return 0, "wrap"
        v = math.trunc(v)
    w = wrap_int(v, t.width, t.signed)
    return w, ("wrap" if w != v else "")
