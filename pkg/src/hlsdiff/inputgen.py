"""Test-input batches: a share from a three-stage LLM reasoning chain, the
rest from adaptive mutation of corpus seeds."""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .execution.inputs import InputFormat, InputFormatError, TestInput
from .llm import ClientError, LLMClient, extract_fenced
from .minic import ast as A
from .minic.printer import format_directive, format_program
from .mutation import EmptyInput, MutationScheduler, MutationType, apply_mutation
from .spectra import FeedbackArray

log = logging.getLogger(__name__)

DEFAULT_SCENARIO = "general numeric kernel processing integer and fixed-point data streams"
LLM_RATIO = 0.3

FORMAT_RULES = (
    "Output rules: generate one test input per line. Separate values with spaces, "
    "separate entries with ' | ' and matrix rows with ' ; '. Place all lines between "
    "triple backticks and write nothing else inside the block."
)


class NoParsableInputs(ValueError):
    pass


@dataclass(frozen=True)
class PromptChain:
    stage1: str
    stage2: str
    stage3: str
    context: str

    def stage3_prompt(self, previous: str, count: int, feedback: Optional[FeedbackArray] = None,
                      batch: int = 0) -> str:
        fb = feedback.to_text().rstrip() if feedback is not None and len(feedback) else "(none yet)"
        return (f"{self.stage3}\n\nPrevious analysis:\n{previous}\n\n"
                f"Spectra feedback (type name min max):\n{fb}\n\n"
                f"Batch {batch}. Generate exactly {count} test inputs.\n{self.context}")


def _directive_lines(p: A.Program) -> list:
    out = []
    for b in p.directives:
        func, name = A.split_qualified(b.target)
        args = (name,) + tuple(("signed" if x else "unsigned") if isinstance(x, bool) else x for x in b.params)
        out.append(format_directive(A.Directive(b.directive, args)) + (f"  in {func}" if func else ""))
    return out


def build_reasoning_chain(p: A.Program, scenario: str, fmt: InputFormat) -> PromptChain:
    src = format_program(p)
    context = "Data format constraints:\n" + "\n".join(fmt.describe()) + "\n" + FORMAT_RULES
    stage1 = (f"Task scenario: {scenario}.\n"
              "Stage 1, overall code analysis. Describe the structure of the program below: its "
              "functions, loops, data flow from inputs to the returned value, and the value ranges "
              f"each variable may take.\n\n```\n{src}```\n\n{context}")
    stage2 = ("Stage 2, statement analysis. Using the analysis above, go through the statements that "
              "compute the result. Point out arithmetic that can exceed its type, array indices that "
              "depend on input data, and loops whose trip count depends on input size.")
    dirs = _directive_lines(p)
    if dirs:
        dtext = "Directives:\n" + "\n".join(dirs)
    else:
        dtext = "Directives: no directives present."
    stage3 = ("Stage 3, directive analysis. Explain how each hardware directive changes behaviour "
              "compared with the software program (bit widths, static array capacities, pipelined or "
              "unrolled loops, FIFO depths, recursion limits) and design inputs that drive the program "
              f"to those boundaries.\n{dtext}")
    return PromptChain(stage1, stage2, stage3, context)


def parse_inputs(text: str, fmt: InputFormat, k: int) -> list:
    """Well-formed inputs from the first fenced block of ``text``, at most ``k``."""
    body = extract_fenced(text)
    if body is None:
        return []
    out = []
    for line in body.splitlines():
        if not line.strip():
            continue
        try:
            out.append(fmt.parse_line(line))
        except InputFormatError:
            continue
        if len(out) == k:
            break
    return out


def llm_generate_inputs(c: LLMClient, chain: PromptChain, k: int, fmt: InputFormat,
                        feedback: Optional[FeedbackArray] = None, batch: int = 0) -> list:
    """Run the three stages in order, each seeing the previous answer."""
    if k < 1:
        raise ValueError("k must be at least 1")
    r1 = c.complete(chain.stage1)
    r2 = c.complete(f"{chain.stage2}\n\nPrevious analysis:\n{r1}")
    r3 = c.complete(chain.stage3_prompt(r2, k, feedback, batch))
    found = parse_inputs(r3, fmt, k)
    if not found:
        raise NoParsableInputs("no well-formed input in the response")
    return found


@dataclass
class Generated:
    input: TestInput
    source: str  # 'llm' | 'mutation' | 'seed'
    op: Optional[MutationType] = None


@dataclass
class InputGenerator:
    """Batch assembly for one program."""

    fmt: InputFormat
    scheduler: MutationScheduler
    corpus: list
    client: Optional[LLMClient] = None
    chain: Optional[PromptChain] = None
    ratio: float = LLM_RATIO
    seed: int = 0
    slot_names: tuple = ()
    feedback: Optional[FeedbackArray] = None
    batches: int = 0
    llm_failures: int = 0
    ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.corpus:
            raise ValueError("corpus must hold at least one seed")
        self.rng = random.Random(self.seed * 7919 + 1)

    def set_feedback(self, fb: FeedbackArray):
        self.feedback = fb
        self.ranges = {}
        for k, name in enumerate(self.slot_names):
            row = fb.row(name)
            if row is not None:
                self.ranges[k] = (row.min, row.max)

    def mutate_one(self) -> Generated:
        seed = self.rng.choice(self.corpus)
        op = self.scheduler.select()
        try:
            out = apply_mutation(seed, op, self.fmt, self.rng, self.ranges)
        except EmptyInput:
            out = seed  # operator does not apply to this input
        return Generated(out, "mutation", op)

    def next_batch(self, B: int) -> list:
        if B < 1:
            raise ValueError("batch size must be at least 1")
        self.batches += 1
        out = []
        want = math.ceil(self.ratio * B) if self.client is not None and self.chain is not None else 0
        if want:
            try:
                got = llm_generate_inputs(self.client, self.chain, want, self.fmt, self.feedback, self.batches)
                out.extend(Generated(i, "llm") for i in got[:want])
            except (ClientError, NoParsableInputs) as e:
                self.llm_failures += 1
                log.warning("LLM generation failed (%s); using mutation only for this batch", e)
        while len(out) < B:
            out.append(self.mutate_one())
        self.rng.shuffle(out)
        return out


def next_batch(gen: InputGenerator, B: int) -> list:
    return gen.next_batch(B)
