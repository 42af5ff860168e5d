"""Global record table of executed input ranges and shapes.

An input is executed only when it reaches outside every range recorded so
far or has an unseen shape; otherwise it is subsumed and skipped.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum

from .execution.inputs import TestInput


class Decision(str, Enum):
    EXECUTE = "execute"
    SKIP = "skip"


@dataclass(frozen=True)
class TableSnapshot:
    version: int
    ranges: tuple
    shapes: frozenset

    def decide(self, inp: TestInput) -> Decision:
        return _decide(self.ranges, self.shapes, inp)


def _slot_range(inp: TestInput, k: int):
    flat = inp.flat(k)
    if not flat:
        return None
    return (min(flat), max(flat))


def _decide(ranges: tuple, shapes, inp: TestInput) -> Decision:
    if not shapes or inp.shape() not in shapes or len(ranges) != len(inp.values):
        return Decision.EXECUTE
    for k, rec in enumerate(ranges):
        r = _slot_range(inp, k)
        if r is None:
            continue
        if rec is None or r[0] < rec[0] or r[1] > rec[1]:
            return Decision.EXECUTE
    return Decision.SKIP


@dataclass
class RecordTable:
    """Observed ``[lo, hi]`` per input entry plus the set of input shapes."""

    ranges: list = field(default_factory=list)
    shapes: set = field(default_factory=set)
    executions: int = 0
    skips: int = 0
    version: int = 0
    skip_log: list = field(default_factory=list)  # (input line, table version)

    def __post_init__(self):
        self._lock = threading.Lock()
        self._snapshots = {}

    def should_execute(self, inp: TestInput) -> Decision:
        return _decide(tuple(self.ranges), self.shapes, inp)

    def update_record(self, inp: TestInput) -> None:
        if not self.ranges:
            self.ranges = [None] * len(inp.values)
        changed = False
        for k in range(len(inp.values)):
            r = _slot_range(inp, k)
            if r is None:
                continue
            cur = self.ranges[k]
            new = r if cur is None else (min(cur[0], r[0]), max(cur[1], r[1]))
            if new != cur:
                self.ranges[k] = new
                changed = True
        shape = inp.shape()
        if shape not in self.shapes:
            self.shapes.add(shape)
            changed = True
        if changed:
            self.version += 1
        self.executions += 1

    def snapshot(self) -> TableSnapshot:
        snap = self._snapshots.get(self.version)
        if snap is None:
            snap = TableSnapshot(self.version, tuple(self.ranges), frozenset(self.shapes))
            self._snapshots[self.version] = snap
        return snap

    def decide_and_update(self, inp: TestInput) -> Decision:
        """Check-then-act as one atomic step."""
        with self._lock:
            d = self.should_execute(inp)
            if d is Decision.EXECUTE:
                self.update_record(inp)
            else:
                self.skips += 1
                self.skip_log.append((inp.to_line(), self.version))
                self.snapshot()
            return d

    def snapshot_at(self, version: int) -> TableSnapshot:
        return self._snapshots[version]

    def justify_skips(self, fmt) -> list:
        """Replay every logged skip against the table as it was at skip
        time; return the entries that would not be skipped (should be none)."""
        bad = []
        for line, version in self.skip_log:
            if self.snapshot_at(version).decide(fmt.parse_line(line)) is not Decision.SKIP:
                bad.append((line, version))
        return bad

    @property
    def skip_rate(self) -> float:
        total = self.executions + self.skips
        return self.skips / total if total else 0.0

    def to_dict(self) -> dict:
        return {
            "ranges": [None if r is None else [r[0], r[1]] for r in self.ranges],
            "shapes": sorted([list(map(list, s)) for s in self.shapes]),
            "executions": self.executions,
            "skips": self.skips,
            "version": self.version,
        }


def should_execute(t: RecordTable, inp: TestInput) -> Decision:
    return t.should_execute(inp)


def update_record(t: RecordTable, inp: TestInput) -> RecordTable:
    t.update_record(inp)
    return t
