"""Runtime spectra: probe instrumentation, per-run aggregation, cross-mode
comparison and the feedback array that steers mutation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .execution.hwconfig import HardwareConfig
from .execution.trace import ExecTrace, fmt
from .minic import ast as A
from .slicer import KeyVariableSet

CATEGORIES = ("val", "offset", "loop", "stack", "fifo")

OVERFLOW = "Overflow"
TRUNCATION = "Truncation"
OUT_OF_BOUNDS = "OutOfBounds"
ORDER_DEPENDENCE = "OrderDependence"
STACK_OVERFLOW = "StackOverflow"
FIFO_FAULT = "FifoFault"
DIV_BY_ZERO = "DivByZero"
OUTPUT_MISMATCH = "OutputMismatch"

CLASSES = (OVERFLOW, TRUNCATION, OUT_OF_BOUNDS, ORDER_DEPENDENCE, STACK_OVERFLOW,
           FIFO_FAULT, DIV_BY_ZERO, OUTPUT_MISMATCH)

FAULT_CLASS = {
    "oob": OUT_OF_BOUNDS,
    "oob_static": OUT_OF_BOUNDS,
    "stack_overflow": STACK_OVERFLOW,
    "fifo_deadlock": FIFO_FAULT,
    "fifo_empty": FIFO_FAULT,
    "div_by_zero": DIV_BY_ZERO,
}


class UnknownVariable(KeyError):
    pass


class InputMismatch(ValueError):
    pass


# ------------------------------------------------------------- instrumentation


def instrument(p: A.Program, kv: KeyVariableSet) -> A.Program:
    """Return ``p`` with probe flags on writes and accesses of key variables,
    and on every loop, user call and FIFO operation. An empty key set leaves
    the program unchanged."""
    members = set(kv.members)
    if not members:
        return p
    declared = {g.name for g in p.globals}
    for fn in p.functions.values():
        declared |= {A.qualify(fn.name, prm.name) for prm in fn.params}
        declared |= {A.qualify(fn.name, s.name) for s in A.iter_stmts(fn.body) if isinstance(s, A.Decl)}
        if fn.ret:
            declared.add(A.qualify(fn.name, "return"))
    missing = sorted(members - declared)
    if missing:
        raise UnknownVariable(", ".join(missing))

    globals_ = {g.name for g in p.globals}
    functions = p.functions

    def rewrite_fn(fn: A.Function) -> A.Function:
        locals_ = {prm.name for prm in fn.params} | {s.name for s in A.iter_stmts(fn.body) if isinstance(s, A.Decl)}

        def key(name):
            q = A.qualify(fn.name, name) if name in locals_ or name not in globals_ else name
            return q in members

        def ex(e):
            if isinstance(e, A.Index):
                return replace(e, indices=tuple(ex(i) for i in e.indices), probe=e.probe or key(e.name))
            if isinstance(e, A.Unary):
                return replace(e, operand=ex(e.operand))
            if isinstance(e, A.Binary):
                return replace(e, left=ex(e.left), right=ex(e.right))
            if isinstance(e, A.Call):
                probe = e.probe or e.func in functions or e.func in ("push", "pop")
                return replace(e, args=tuple(ex(a) for a in e.args), probe=probe)
            return e

        def st(s):
            if isinstance(s, A.Decl):
                return replace(s, sizes=tuple(None if z is None else ex(z) for z in s.sizes),
                               init=None if s.init is None else ex(s.init),
                               probe=s.probe or (key(s.name) and not s.sizes and not s.chan))
            if isinstance(s, A.Assign):
                t = s.target
                if isinstance(t, A.Index):
                    t = replace(t, indices=tuple(ex(i) for i in t.indices))
                return replace(s, target=t, value=ex(s.value), probe=s.probe or key(t.name))
            if isinstance(s, A.ExprStmt):
                return replace(s, expr=ex(s.expr))
            if isinstance(s, A.If):
                return replace(s, cond=ex(s.cond), then=blk(s.then),
                               orelse=None if s.orelse is None else blk(s.orelse))
            if isinstance(s, A.For):
                return replace(s, init=None if s.init is None else st(s.init),
                               cond=None if s.cond is None else ex(s.cond),
                               step=None if s.step is None else st(s.step), body=blk(s.body), probe=True)
            if isinstance(s, A.While):
                return replace(s, cond=ex(s.cond), body=blk(s.body), probe=True)
            if isinstance(s, A.Return) and s.value is not None:
                return replace(s, value=ex(s.value))
            return s

        def blk(b):
            return A.Block(tuple(st(s) for s in b.stmts))

        params = tuple(replace(prm, probe=prm.probe or (key(prm.name) and not prm.chan)) for prm in fn.params)
        return replace(fn, params=params, body=blk(fn.body))

    items = []
    for it in p.items:
        if isinstance(it, A.Function):
            items.append(rewrite_fn(it))
        elif isinstance(it, A.Decl) and it.name in members and not it.sizes and not it.chan:
            items.append(replace(it, probe=True))
        else:
            items.append(it)
    return replace(p, items=tuple(items))


# --------------------------------------------------------------------- records


def _widen(d: dict, k, lo, hi):
    cur = d.get(k)
    if cur is None:
        d[k] = (lo, hi)
    else:
        d[k] = (min(cur[0], lo), max(cur[1], hi))


@dataclass
class SpectraRecord:
    """Spectra of one run (or a union of runs).

    ``val`` and ``offset`` map a variable to a closed ``(min, max)`` interval
    or ``None`` when the variable was monitored but never touched. For 2-D
    arrays ``offset`` spans all index components. ``loop`` counts
    iterations per loop id, ``stack`` is the deepest call per function and
    ``fifo`` the highest occupancy per channel. ``coercions`` keeps the
    lossy-store tags seen per variable and ``faults`` the fault classes.
    """

    val: dict = field(default_factory=dict)
    offset: dict = field(default_factory=dict)
    loop: dict = field(default_factory=dict)
    stack: dict = field(default_factory=dict)
    fifo: dict = field(default_factory=dict)
    coercions: dict = field(default_factory=dict)
    faults: set = field(default_factory=set)
    types: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def iv(d):
            return {k: (None if v is None else [v[0], v[1]]) for k, v in sorted(d.items())}
        return {
            "val": iv(self.val),
            "offset": iv(self.offset),
            "loop": dict(sorted(self.loop.items())),
            "stack": dict(sorted(self.stack.items())),
            "fifo": dict(sorted(self.fifo.items())),
            "coercions": {k: sorted(v) for k, v in sorted(self.coercions.items())},
            "faults": sorted(self.faults),
        }

    def to_text(self) -> str:
        lines = []
        for cat in CATEGORIES:
            for k, v in sorted(getattr(self, cat).items()):
                lines.append(f"{cat} {k} {'-' if v is None else fmt(v)}")
        for f in sorted(self.faults):
            lines.append(f"fault {f}")
        return "\n".join(lines) + ("\n" if lines else "")

    def copy(self) -> "SpectraRecord":
        return SpectraRecord(dict(self.val), dict(self.offset), dict(self.loop), dict(self.stack),
                             dict(self.fifo), {k: set(v) for k, v in self.coercions.items()},
                             set(self.faults), dict(self.types))


def collect_spectra(t: ExecTrace, kv: KeyVariableSet, categories=CATEGORIES) -> SpectraRecord:
    """Fold the probe events of ``t`` into a :class:`SpectraRecord`."""
    cats = set(categories)
    rec = SpectraRecord(types=dict(kv.types))
    members = set(kv.members)
    for m in members:
        if "val" in cats and A.split_qualified(m)[1] != "return":
            rec.val[m] = None
    for e in t.events:
        k = e.kind
        if k == "write" and e.symbol in members:
            if "val" in cats:
                v = e.values[0]
                _widen(rec.val, e.symbol, v, v)
            if e.values[2]:
                rec.coercions.setdefault(e.symbol, set()).add(e.values[2])
        elif k == "array_access" and "offset" in cats and e.symbol in members:
            _widen(rec.offset, e.symbol, min(e.values), max(e.values))
        elif k == "loop_iter" and "loop" in cats:
            rec.loop[e.symbol] = rec.loop.get(e.symbol, 0) + 1
        elif k == "call" and "stack" in cats:
            rec.stack[e.symbol] = max(rec.stack.get(e.symbol, 0), e.values[0])
        elif k == "fifo_op" and "fifo" in cats:
            rec.fifo[e.symbol] = max(rec.fifo.get(e.symbol, 0), e.values[1])
        elif k == "fault":
            rec.faults.add(FAULT_CLASS.get(e.values[0], e.values[0]))
    return rec


def merge(a: SpectraRecord, b: SpectraRecord) -> SpectraRecord:
    """Interval union / maximum of two records (commutative)."""
    out = a.copy()
    for cat in ("val", "offset"):
        d = getattr(out, cat)
        for k, v in getattr(b, cat).items():
            if v is None:
                d.setdefault(k, None)
            else:
                _widen(d, k, v[0], v[1])
    for k, v in b.loop.items():
        out.loop[k] = max(out.loop.get(k, 0), v)
    for k, v in b.stack.items():
        out.stack[k] = max(out.stack.get(k, 0), v)
    for k, v in b.fifo.items():
        out.fifo[k] = max(out.fifo.get(k, 0), v)
    for k, v in b.coercions.items():
        out.coercions.setdefault(k, set()).update(v)
    out.faults |= b.faults
    out.types.update(b.types)
    return out


def new_extremes(seen: SpectraRecord, rec: SpectraRecord) -> list:
    """What ``rec`` adds beyond ``seen``: strict widening of any interval, a new
    loop/stack/FIFO maximum, or a fault class not seen before."""
    found = []
    for cat in ("val", "offset"):
        old = getattr(seen, cat)
        for k, v in getattr(rec, cat).items():
            if v is None:
                continue
            o = old.get(k)
            if o is None or v[0] < o[0] or v[1] > o[1]:
                found.append((cat, k))
    for cat in ("loop", "stack", "fifo"):
        old = getattr(seen, cat)
        for k, v in getattr(rec, cat).items():
            if v > old.get(k, -1):
                found.append((cat, k))
    for f in sorted(rec.faults - seen.faults):
        found.append(("fault", f))
    return found


# ------------------------------------------------------------------ comparison


@dataclass(frozen=True)
class Symptom:
    cls: str
    variable: str
    software: str
    hardware: str

    @property
    def signature(self) -> tuple:
        return (self.cls, self.variable)

    def to_line(self) -> str:
        return f"{self.cls} {self.variable} sw={self.software} hw={self.hardware}"


@dataclass(frozen=True)
class DiscrepancyReport:
    symptoms: tuple = ()

    @property
    def verdict(self) -> str:
        return "discrepant" if self.symptoms else "clean"

    @property
    def classes(self) -> set:
        return {s.cls for s in self.symptoms}

    def to_text(self) -> str:
        return f"verdict {self.verdict}\n" + "".join(s.to_line() + "\n" for s in self.symptoms)


def _outcome(t: ExecTrace) -> str:
    outs = "-" if t.outputs is None else " ".join(fmt(v) for v in t.outputs)
    return f"{t.status_text()} [{outs}]"


def compare_spectra(sw: tuple, hw: tuple, cfg: Optional[HardwareConfig] = None) -> DiscrepancyReport:
    """Classify the differences between a software and a hardware run.

    Priority: hardware faults, then width symptoms (overflow, truncation),
    then order dependence, then a residual output mismatch.
    """
    cfg = cfg or HardwareConfig()
    (ts, rs), (th, rh) = sw, hw
    if ts.input_line != th.input_line:
        raise InputMismatch(f"{ts.input_line!r} != {th.input_line!r}")
    same_outcome = ts.status == th.status and ts.reason == th.reason and ts.outputs == th.outputs
    symptoms = []

    sw_faults = {(e.symbol, e.values[0]) for e in ts.faults()}
    seen = set()
    for e in th.faults():
        reason = e.values[0]
        key = (e.symbol, reason)
        if key in seen or (same_outcome and key in sw_faults):
            continue
        seen.add(key)
        cls = FAULT_CLASS.get(reason, OUTPUT_MISMATCH)
        symptoms.append(Symptom(cls, e.symbol, _outcome(ts), f"{reason} {fmt(e.values[1:])}"))

    for var, spec in sorted(cfg.types.items()):
        sv, hv = rs.val.get(var), rh.val.get(var)
        if sv is None:
            continue
        lo, hi = spec.bounds()
        if (sv[0] < lo or sv[1] > hi) and (not same_outcome or sv != hv):
            symptoms.append(Symptom(OVERFLOW, var, f"val {fmt(sv)}",
                                    f"val {fmt(hv)} range [{fmt(lo)} {fmt(hi)}]"))
    for var, tags in sorted(rh.coercions.items()):
        if any("trunc" in t for t in tags):
            symptoms.append(Symptom(TRUNCATION, var, f"val {fmt(rs.val.get(var))}",
                                    f"val {fmt(rh.val.get(var))} tags {','.join(sorted(tags))}"))

    if not same_outcome and not symptoms:
        if cfg.reorders:
            where = sorted(set(cfg.pipeline) | set(cfg.unroll) | set(cfg.dataflow))
            symptoms.append(Symptom(ORDER_DEPENDENCE, ",".join(where), _outcome(ts), _outcome(th)))
        else:
            symptoms.append(Symptom(OUTPUT_MISMATCH, "return", _outcome(ts), _outcome(th)))
    return DiscrepancyReport(tuple(symptoms))


# -------------------------------------------------------------------- feedback


@dataclass(frozen=True)
class FeedbackRow:
    type: str
    name: str
    min: float
    max: float

    def to_line(self) -> str:
        return f"{self.type} {self.name} {fmt(self.min)} {fmt(self.max)}"


@dataclass(frozen=True)
class FeedbackArray:
    rows: tuple = ()

    def row(self, name: str) -> Optional[FeedbackRow]:
        for r in self.rows:
            if r.name == name:
                return r
        return None

    def to_text(self) -> str:
        return "".join(r.to_line() + "\n" for r in self.rows)

    def __len__(self):
        return len(self.rows)


def feedback_array(s: SpectraRecord) -> FeedbackArray:
    """One ``(type, name, min, max)`` row per monitored variable with a value,
    sorted by name."""
    rows = []
    for name, v in sorted(s.val.items()):
        if v is None:
            continue
        rows.append(FeedbackRow(s.types.get(name, "int"), name, v[0], v[1]))
    return FeedbackArray(tuple(rows))
