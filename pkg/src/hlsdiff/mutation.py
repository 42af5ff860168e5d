"""Eight input mutation operators and the adaptive scheduler choosing them."""

from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional

from .execution.inputs import InputFormat, SlotFormat, TestInput


class MutationType(IntEnum):
    DataSize = 1
    DataDimension = 2
    ZeroValue = 3
    Order = 4
    DataElement = 5
    DataType = 6
    BitFlip = 7
    ByteFlip = 8


N_OPS = len(MutationType)
ALPHA = 0.04
EPSILON = 0.01
RETRIES = 16


class EmptyInput(ValueError):
    pass


def project(P: list, eps: float = EPSILON) -> list:
    """Clamp every entry to at least ``eps`` and rescale the rest so the
    vector sums to 1. Entries clamped once stay clamped."""
    P = list(P)
    fixed = [False] * len(P)
    while True:
        n_fixed = sum(fixed)
        free_total = sum(p for p, f in zip(P, fixed) if not f)
        target = 1.0 - eps * n_fixed
        if free_total <= 0:
            k = len(P) - n_fixed
            P = [eps if f else target / k for f in fixed]
        else:
            P = [eps if f else p * target / free_total for p, f in zip(P, fixed)]
        low = [i for i, p in enumerate(P) if not fixed[i] and p < eps]
        if not low:
            return P
        for i in low:
            fixed[i] = True


@dataclass
class MutationScheduler:
    """Activation probabilities of the eight operators.

    A triggered update raises the winner by ``alpha`` and lowers every other
    operator by ``alpha / 7``; results below ``epsilon`` are clamped and the
    vector renormalised.
    """

    seed: int = 0
    alpha: float = ALPHA
    epsilon: float = EPSILON
    adaptive: bool = True
    P: list = field(default_factory=lambda: [1.0 / N_OPS] * N_OPS)
    history: list = field(default_factory=list)

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    def select(self) -> MutationType:
        r = self.rng.random()
        acc = 0.0
        for k, p in enumerate(self.P):
            acc += p
            if r < acc:
                return MutationType(k + 1)
        return MutationType(N_OPS)

    def update(self, winner: MutationType, triggered: bool) -> None:
        self.history.append((len(self.history) + 1, int(winner), bool(triggered)))
        if not triggered or not self.adaptive:
            return
        w = int(winner) - 1
        raw = [p + self.alpha if i == w else p - self.alpha / (N_OPS - 1) for i, p in enumerate(self.P)]
        if min(raw) >= self.epsilon:
            self.P = raw
        else:
            self.P = project(raw, self.epsilon)

    def state(self) -> dict:
        return {
            "P": list(self.P),
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "adaptive": self.adaptive,
            "seed": self.seed,
            "history_length": len(self.history),
            "rng": [self.rng.getstate()[0], list(self.rng.getstate()[1]), self.rng.getstate()[2]],
        }

    @classmethod
    def from_state(cls, d: dict) -> "MutationScheduler":
        s = cls(seed=d["seed"], alpha=d["alpha"], epsilon=d["epsilon"], adaptive=d["adaptive"], P=list(d["P"]))
        v, st, g = d["rng"]
        s.rng.setstate((v, tuple(st), g))
        return s


def select_mutation(s: MutationScheduler) -> MutationType:
    return s.select()


def update_probabilities(s: MutationScheduler, winner: MutationType, triggered: bool) -> MutationScheduler:
    s.update(winner, triggered)
    return s


# ------------------------------------------------------------------- operators


def _to_mut(v):
    if isinstance(v, tuple):
        return [_to_mut(x) for x in v]
    return v


def _to_frozen(v):
    if isinstance(v, list):
        return tuple(_to_frozen(x) for x in v)
    return v


def _positions(values: list, slot: int) -> list:
    v = values[slot]
    if not isinstance(v, list):
        return [(slot,)]
    if v and isinstance(v[0], list):
        return [(slot, i, j) for i, row in enumerate(v) for j in range(len(row))]
    return [(slot, i) for i in range(len(v))]


def _get(values, pos):
    v = values[pos[0]]
    for k in pos[1:]:
        v = v[k]
    return v


def _set(values, pos, x):
    if len(pos) == 1:
        values[pos[0]] = x
        return
    v = values[pos[0]]
    for k in pos[1:-1]:
        v = v[k]
    v[pos[-1]] = x


def _fits(x, slot: SlotFormat) -> bool:
    if isinstance(x, float):
        if not slot.is_float or not math.isfinite(x):
            return False
    return slot.lo <= x <= slot.hi


def _sample_value(rng: random.Random, slot: SlotFormat, rng_range: Optional[tuple], current: list):
    """Uniform draw over the observed range widened by its own width."""
    if rng_range is not None:
        lo, hi = rng_range
    elif current:
        lo, hi = min(current), max(current)
    else:
        lo, hi = slot.lo, slot.hi
    w = max(hi - lo, 1)
    lo, hi = max(slot.lo, lo - w), min(slot.hi, hi + w)
    if lo > hi:
        lo, hi = slot.lo, slot.hi
    if slot.is_float:
        return rng.uniform(lo, hi)
    return rng.randint(math.ceil(lo), math.floor(hi))


def encoding(slot: Optional[SlotFormat]) -> tuple:
    """``(width, signed)`` of the integer encoding flips operate on: the
    narrowest whole number of bytes covering the slot's value range, so a
    flip stays near the domain the program expects. 32-bit signed without a
    slot."""
    if slot is None:
        return 32, True
    lo, hi = int(math.floor(slot.lo)), int(math.ceil(slot.hi))
    if lo >= 0:
        bits, signed = max(hi.bit_length(), 1), False
    else:
        bits, signed = max((-lo - 1).bit_length(), hi.bit_length()) + 1, True
    return min(64, 8 * math.ceil(bits / 8)), signed


def flip_bits(x, mask: int, slot: Optional[SlotFormat] = None):
    """XOR ``mask`` into the two's-complement encoding of an integer (see
    :func:`encoding`) or the IEEE-754 bits of a float, and decode it back."""
    if isinstance(x, float):
        (bits,) = struct.unpack("<Q", struct.pack("<d", x))
        (y,) = struct.unpack("<d", struct.pack("<Q", bits ^ (mask & 0xFFFFFFFFFFFFFFFF)))
        return y
    width, signed = encoding(slot)
    full = (1 << width) - 1
    m = (x & full) ^ (mask & full)
    if signed and m >> (width - 1):
        m -= 1 << width
    return m


def _element_slots(fmt: InputFormat, values: list) -> list:
    return [k for k in range(len(fmt.slots)) if _positions(values, k)]


def _array_slots(fmt: InputFormat) -> list:
    return [k for k, s in enumerate(fmt.slots) if s.shape != "scalar"]


def _try(op, inp: TestInput, fmt: InputFormat, rng: random.Random, ranges: dict) -> Optional[TestInput]:
    values = _to_mut(inp.values)
    done = op(values, fmt, rng, ranges)
    if not done:
        return None
    out = TestInput(_to_frozen(values))
    if out.key() == inp.key() or not fmt.conforms(out):
        return None
    return out


def _op_size(values, fmt, rng, ranges):
    slots = _array_slots(fmt)
    if not slots:
        return False
    k = rng.choice(slots)
    s, v = fmt.slots[k], values[k]
    grow = rng.random() < 0.5
    if s.shape == "array":
        if (grow or len(v) <= s.min_len) and len(v) < s.max_len:
            v.insert(rng.randint(0, len(v)), _sample_value(rng, s, ranges.get(k), v))
        elif len(v) > s.min_len:
            del v[rng.randrange(len(v))]
        else:
            return False
        return True
    cols = len(v[0]) if v else 1
    flat = [x for r in v for x in r]
    if (grow or len(v) <= s.min_len) and len(v) < s.max_len:
        v.insert(rng.randint(0, len(v)), [_sample_value(rng, s, ranges.get(k), flat) for _ in range(cols)])
    elif len(v) > s.min_len:
        del v[rng.randrange(len(v))]
    else:
        return False
    return True


def _op_dimension(values, fmt, rng, ranges):
    slots = _array_slots(fmt)
    if not slots:
        return False
    k = rng.choice(slots)
    s, v = fmt.slots[k], values[k]
    if s.shape == "array":
        n = rng.randint(s.min_len, s.max_len)
        if n == len(v):
            return False
        if n < len(v):
            del v[n:]
        else:
            v.extend(_sample_value(rng, s, ranges.get(k), v) for _ in range(n - len(v)))
        return True
    cols = len(v[0]) if v else 0
    flat = [x for r in v for x in r]
    if (rng.random() < 0.5 or cols <= s.min_cols) and cols < s.max_cols:
        j = rng.randint(0, cols)
        for r in v:
            r.insert(j, _sample_value(rng, s, ranges.get(k), flat))
    elif cols > s.min_cols:
        j = rng.randrange(cols)
        for r in v:
            del r[j]
    else:
        return False
    return True


def _pick_position(values, fmt, rng):
    slots = _element_slots(fmt, values)
    if not slots:
        raise EmptyInput("input has no elements to mutate")
    k = rng.choice(slots)
    return k, rng.choice(_positions(values, k))


def _op_zero(values, fmt, rng, ranges):
    k, pos = _pick_position(values, fmt, rng)
    x = _get(values, pos)
    z = 0.0 if isinstance(x, float) else 0
    if x == z or not _fits(z, fmt.slots[k]):
        return False
    _set(values, pos, z)
    return True


def _op_order(values, fmt, rng, ranges):
    slots = _array_slots(fmt)
    if not slots:
        raise EmptyInput("no array entry to reorder")
    k = rng.choice(slots)
    v = values[k]
    if len(v) < 2:
        return False
    i, j = rng.sample(range(len(v)), 2)
    if v[i] == v[j]:
        return False
    v[i], v[j] = v[j], v[i]
    return True


def _op_element(values, fmt, rng, ranges):
    k, pos = _pick_position(values, fmt, rng)
    s = fmt.slots[k]
    current = [_get(values, p) for p in _positions(values, k)]
    _set(values, pos, _sample_value(rng, s, ranges.get(k), current))
    return True


def _op_type(values, fmt, rng, ranges):
    k, pos = _pick_position(values, fmt, rng)
    s = fmt.slots[k]
    if not s.is_float:
        return False
    x = _get(values, pos)
    if isinstance(x, float):
        if not x.is_integer():
            return False
        _set(values, pos, int(x))
    else:
        _set(values, pos, float(x))
    return True


def _op_bitflip(values, fmt, rng, ranges):
    k, pos = _pick_position(values, fmt, rng)
    s = fmt.slots[k]
    x = _get(values, pos)
    bits = 64 if isinstance(x, float) else encoding(s)[0]
    y = flip_bits(x, 1 << rng.randrange(bits), s)
    if not _fits(y, s):
        return False
    _set(values, pos, y)
    return True


def _op_byteflip(values, fmt, rng, ranges):
    k, pos = _pick_position(values, fmt, rng)
    s = fmt.slots[k]
    x = _get(values, pos)
    lanes = 8 if isinstance(x, float) else encoding(s)[0] // 8
    y = flip_bits(x, 0xFF << (8 * rng.randrange(lanes)), s)
    if not _fits(y, s):
        return False
    _set(values, pos, y)
    return True


OPERATORS = {
    MutationType.DataSize: _op_size,
    MutationType.DataDimension: _op_dimension,
    MutationType.ZeroValue: _op_zero,
    MutationType.Order: _op_order,
    MutationType.DataElement: _op_element,
    MutationType.DataType: _op_type,
    MutationType.BitFlip: _op_bitflip,
    MutationType.ByteFlip: _op_byteflip,
}


def apply_mutation(inp: TestInput, m: MutationType, fmt: InputFormat, rng: random.Random,
                   ranges: Optional[dict] = None, retries: int = RETRIES) -> TestInput:
    """Apply operator ``m`` once. ``ranges`` maps a slot index to the
    observed ``(min, max)`` used for new element values. Draws that leave
    the format or change nothing are retried; a degenerate case returns
    ``inp`` unchanged."""
    op = OPERATORS[MutationType(m)]
    ranges = ranges or {}
    for _ in range(retries):
        out = _try(op, inp, fmt, rng, ranges)
        if out is not None:
            return out
    return inp
