"""Retrieval-augmented harness repair loop."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..llm import ClientError, extract_fenced
from ..minic import ast as A
from ..minic.compat import check_hw_compat
from ..minic.errors import MiniCError
from ..minic.parser import parse_program
from ..minic.printer import format_program
from .library import RuleLibrary, RuleTemplate, retrieve
from .rewrites import REWRITES

MAX_ITER = 5


@dataclass(frozen=True)
class RepairStep:
    error_log: str
    rule_id: str
    similarity: float
    parsed: bool

    def to_line(self) -> str:
        return f"{self.rule_id} sim={self.similarity:.6f} parsed={'yes' if self.parsed else 'no'} | {self.error_log}"


@dataclass
class RepairOutcome:
    program: A.Program
    source: str
    iterations: int
    steps: list = field(default_factory=list)
    status: str = "exhausted"  # repaired | exhausted | aborted

    @property
    def repaired(self) -> bool:
        return self.status == "repaired"

    def transcript(self) -> str:
        lines = [f"status {self.status}", f"iterations {self.iterations}"]
        lines += [f"step {k + 1} {s.to_line()}" for k, s in enumerate(self.steps)]
        return "\n".join(lines) + "\n"


def build_repair_prompt(source: str, error_log: str, rule: RuleTemplate) -> str:
    return (
        "The test harness below fails hardware synthesis. Revise it so that it conforms to the "
        "synthesis rules while keeping its behaviour.\n\n"
        f"Harness:\n```\n{source}```\n\n"
        f"Compiler error:\n{error_log}\n\n"
        f"Rule ID: {rule.id}\nRule: {rule.rule}\n\n"
        f"Example before:\n{rule.before}\n\nExample after:\n{rule.after}\n\n"
        "Return the complete revised harness in a single fenced code block."
    )


def repair_loop(harness: Union[A.Program, str], lib: RuleLibrary, client, max_iter: int = MAX_ITER) -> RepairOutcome:
    """Check, retrieve a rule for the first error, ask the client for a
    revision; repeat until compatible or ``max_iter`` revisions were tried."""
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    prog = parse_program(harness) if isinstance(harness, str) else harness
    source = harness if isinstance(harness, str) else format_program(prog)
    steps = []
    while True:
        report = check_hw_compat(prog)
        if report.ok:
            return RepairOutcome(prog, source, len(steps), steps, "repaired")
        if len(steps) >= max_iter:
            return RepairOutcome(prog, source, len(steps), steps, "exhausted")
        err = report.errors[0].to_log()
        rule, sim = retrieve(err, lib)
        try:
            reply = client.complete(build_repair_prompt(source, err, rule))
        except ClientError:
            return RepairOutcome(prog, source, len(steps), steps, "aborted")
        body = extract_fenced(reply)
        parsed = False
        if body is not None:
            try:
                prog = parse_program(body)
                source = body
                parsed = True
            except MiniCError:
                pass
        steps.append(RepairStep(err, rule.id, sim, parsed))


class RuleApplyingClient:
    """Mock model that applies the rewrite of the rule named in the prompt
    to the harness embedded in it."""

    def __init__(self):
        self.calls = 0

    def complete(self, prompt: str, params: Optional[dict] = None) -> str:
        self.calls += 1
        body = extract_fenced(prompt) or ""
        rule_id = None
        for line in prompt.splitlines():
            if line.startswith("Rule ID:"):
                rule_id = line.split(":", 1)[1].strip()
                break
        try:
            prog = parse_program(body)
        except MiniCError:
            return f"```\n{body}```"
        fix = REWRITES.get(rule_id)
        if fix is not None:
            try:
                prog = parse_program(format_program(fix(prog)))
            except MiniCError:
                pass
        return f"```\n{format_program(prog)}```"


class InvalidCounts(ValueError):
    pass


def pass_rate(m: int, n: int) -> float:
    """Percentage of successful instances."""
    if n < 1 or not 0 <= m <= n:
        raise InvalidCounts(f"invalid counts m={m}, n={n}")
    return 100.0 * m / n
