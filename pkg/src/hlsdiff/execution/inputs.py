"""Typed test inputs and their one-line wire format.

A line holds one test input. Entries are separated by `` | ``; inside an
entry values are separated by spaces and matrix rows by `` ; ``::

    1 4 7 8 | 3
    1 2 ; 3 4
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from ..minic import ast as A
from ..minic.types import BASE_TYPES, TypeSpec

ENTRY_SEP = " | "
ROW_SEP = " ; "
DEFAULT_MAX_LEN = 32
FLOAT_LIMIT = 1e9


class InputFormatError(ValueError):
    pass


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _shape_of(v) -> tuple:
    if isinstance(v, tuple):
        if v and isinstance(v[0], tuple):
            return (len(v), len(v[0]))
        return (len(v),)
    return ()


def _flat(v):
    if isinstance(v, tuple):
        for x in v:
            yield from _flat(x)
    else:
        yield v


@dataclass(frozen=True)
class TestInput:
    """An ordered vector of entries: scalars, 1-D tuples or 2-D tuples of rows."""

    __test__ = False  # not a pytest class

    values: tuple

    def shape(self) -> tuple:
        return tuple(_shape_of(v) for v in self.values)

    def flat(self, slot: Optional[int] = None) -> list:
        if slot is None:
            return list(_flat(self.values))
        return list(_flat(self.values[slot]))

    def to_line(self) -> str:
        parts = []
        for v in self.values:
            if isinstance(v, tuple) and v and isinstance(v[0], tuple):
                parts.append(ROW_SEP.join(" ".join(_fmt_value(x) for x in row) for row in v))
            elif isinstance(v, tuple):
                parts.append(" ".join(_fmt_value(x) for x in v))
            else:
                parts.append(_fmt_value(v))
        return ENTRY_SEP.join(parts)

    def key(self) -> tuple:
        """Type-sensitive identity (``2`` and ``2.0`` differ)."""
        return tuple((type(x).__name__, x) for x in _flat(self.values)) + (self.shape(),)

    def __str__(self):
        return self.to_line()


@dataclass(frozen=True)
class SlotFormat:
    """Format constraints for one entry of a test input."""

    name: str
    shape: str  # 'scalar' | 'array' | 'matrix'
    elem: TypeSpec
    min_len: int = 1
    max_len: int = 1
    min_cols: int = 1
    max_cols: int = 1
    lo: float = 0
    hi: float = 0

    @property
    def is_float(self) -> bool:
        return self.elem.kind in ("float", "fixed")

    def describe(self) -> str:
        kind = self.elem.describe()
        rng = f"values in [{_fmt_value(self.lo)}, {_fmt_value(self.hi)}]"
        if self.shape == "scalar":
            return f"{self.name} : scalar {kind}, {rng}"
        if self.shape == "array":
            return f"{self.name} : 1-D array of {kind}, length {self.min_len}..{self.max_len}, {rng}"
        return (f"{self.name} : 2-D matrix of {kind}, rows {self.min_len}..{self.max_len}, "
                f"columns {self.min_cols}..{self.max_cols}, {rng}")


@dataclass(frozen=True)
class InputFormat:
    slots: tuple = ()

    def validate(self, inp: TestInput) -> list:
        """Return a list of violations (empty when ``inp`` conforms)."""
        problems = []
        if len(inp.values) != len(self.slots):
            return [f"expected {len(self.slots)} entries, got {len(inp.values)}"]
        for slot, v in zip(self.slots, inp.values):
            shape = _shape_of(v)
            if slot.shape == "scalar" and shape != ():
                problems.append(f"{slot.name}: expected a scalar")
                continue
            if slot.shape == "array" and len(shape) != 1:
                problems.append(f"{slot.name}: expected a 1-D array")
                continue
            if slot.shape == "matrix":
                if len(shape) != 2 or any(len(r) != shape[1] for r in v):
                    problems.append(f"{slot.name}: expected a rectangular 2-D matrix")
                    continue
                if not slot.min_cols <= shape[1] <= slot.max_cols:
                    problems.append(f"{slot.name}: {shape[1]} columns outside {slot.min_cols}..{slot.max_cols}")
            if shape and not slot.min_len <= shape[0] <= slot.max_len:
                problems.append(f"{slot.name}: length {shape[0]} outside {slot.min_len}..{slot.max_len}")
            for x in _flat(v):
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    problems.append(f"{slot.name}: non-numeric value {x!r}")
                elif isinstance(x, float) and (not slot.is_float or not math.isfinite(x)):
                    problems.append(f"{slot.name}: value {x!r} not allowed for {slot.elem.describe()}")
                elif not slot.lo <= x <= slot.hi:
                    problems.append(f"{slot.name}: value {x!r} outside [{slot.lo}, {slot.hi}]")
        return problems

    def conforms(self, inp: TestInput) -> bool:
        return not self.validate(inp)

    def parse_line(self, line: str) -> TestInput:
        """Parse one wire-format line; raise :class:`InputFormatError` if it
        does not satisfy this format."""
        parts = [p.strip() for p in line.strip().split("|")]
        if len(parts) != len(self.slots):
            raise InputFormatError(f"expected {len(self.slots)} entries, got {len(parts)}")
        values = []
        for slot, part in zip(self.slots, parts):
            if slot.shape == "matrix":
                rows = [r.split() for r in part.split(";")]
                values.append(tuple(tuple(_parse_num(t) for t in r) for r in rows))
            elif slot.shape == "array":
                values.append(tuple(_parse_num(t) for t in part.split()))
            else:
                toks = part.split()
                if len(toks) != 1:
                    raise InputFormatError(f"{slot.name}: expected one scalar")
                values.append(_parse_num(toks[0]))
        inp = TestInput(tuple(values))
        problems = self.validate(inp)
        if problems:
            raise InputFormatError("; ".join(problems))
        return inp

    def describe(self) -> list:
        return [f"entry {k + 1}: {s.describe()}" for k, s in enumerate(self.slots)]

    def sample(self, rng) -> TestInput:
        """A uniformly drawn conforming input (``rng`` is a ``random.Random``)."""
        def value(s):
            if s.is_float:
                return rng.uniform(s.lo, s.hi)
            return rng.randint(math.ceil(s.lo), math.floor(s.hi))
        vals = []
        for s in self.slots:
            if s.shape == "scalar":
                vals.append(value(s))
            elif s.shape == "array":
                vals.append(tuple(value(s) for _ in range(rng.randint(s.min_len, s.max_len))))
            else:
                c = rng.randint(s.min_cols, s.max_cols)
                vals.append(tuple(tuple(value(s) for _ in range(c)) for _ in range(rng.randint(s.min_len, s.max_len))))
        return TestInput(tuple(vals))


def _parse_num(tok: str):
    try:
        if any(c in tok for c in ".eE") and not tok.lower().startswith(("0x", "-0x")):
            return float(tok)
        return int(tok, 0)
    except ValueError:
        raise InputFormatError(f"not a number: {tok!r}") from None


def _default_bounds(t: TypeSpec) -> tuple:
    if t.kind == "float":
        return (-FLOAT_LIMIT, FLOAT_LIMIT)
    return t.bounds()


def derive_format(p: A.Program, overrides: Optional[dict] = None) -> InputFormat:
    """Input format of the entry function's parameters.

    ``overrides`` maps a parameter name to a dict with any of ``lo``,
    ``hi``, ``min_len``, ``max_len``, ``min_cols``, ``max_cols``.
    """
    overrides = overrides or {}
    fn = p.function(p.entry)
    static = {b.target: b.params[0] for b in p.directives if b.directive == "static_array"}
    slots = []
    for prm in fn.params:
        if prm.chan:
            raise InputFormatError(f"entry parameter {prm.name!r} is a channel")
        elem = BASE_TYPES[prm.base]
        lo, hi = _default_bounds(elem)
        q = A.qualify(fn.name, prm.name)
        if not prm.dims:
            slot = SlotFormat(prm.name, "scalar", elem, 1, 1, 1, 1, lo, hi)
        else:
            def cap(d, k):
                if d is not None:
                    return d
                # room to exceed a static capacity, or the open-ended default
                if k == 0 and q in static:
                    return 2 * static[q]
                return DEFAULT_MAX_LEN
            if len(prm.dims) == 1:
                slot = SlotFormat(prm.name, "array", elem, 1, cap(prm.dims[0], 0), 1, 1, lo, hi)
            else:
                slot = SlotFormat(prm.name, "matrix", elem, 1, cap(prm.dims[0], 0), 1,
                                  cap(prm.dims[1], 1), lo, hi)
        if prm.name in overrides:
            slot = replace(slot, **overrides[prm.name])
        slots.append(slot)
    return InputFormat(tuple(slots))
