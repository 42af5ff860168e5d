from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

EVENT_KINDS = ("write", "array_access", "loop_iter", "call", "fifo_op", "fault")


def fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return "[" + " ".join(fmt(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


@dataclass(frozen=True)
class Event:
    step: int
    kind: str
    symbol: str
    values: tuple = ()

    def to_line(self) -> str:
        tail = "".join(" " + fmt(v) for v in self.values)
        return f"{self.step} {self.kind} {self.symbol}{tail}"


@dataclass
class ExecTrace:
    """Observable result of one execution plus its probe events."""

    mode: str
    input_line: str
    status: str = "completed"  # completed | faulted | budget_exhausted
    reason: Optional[str] = None
    outputs: Optional[tuple] = None
    events: list = field(default_factory=list)
    steps: int = 0

    @property
    def faulted(self) -> bool:
        return self.status == "faulted"

    def status_text(self) -> str:
        return f"{self.status}({self.reason})" if self.reason else self.status

    def faults(self) -> list:
        return [e for e in self.events if e.kind == "fault"]

    def serialize(self) -> str:
        """Canonical line-per-event text form."""
        lines = [
            f"mode {self.mode}",
            f"input {self.input_line}",
            f"status {self.status_text()}",
            "outputs " + ("-" if self.outputs is None else " ".join(fmt(v) for v in self.outputs)),
            f"steps {self.steps}",
        ]
        lines.extend(e.to_line() for e in self.events)
        return "\n".join(lines) + "\n"
