"""Closure-compiling MiniC interpreter with software and hardware semantics.

Software mode: ``int``/``uint`` are 32-bit wrapping, ``float`` is binary64,
arrays grow on demand, FIFOs are unbounded and directives are ignored.

Hardware mode applies the program's directives:

* width/fixed types wrap (and truncate) on every store;
* static arrays fault on any index outside their capacity;
* ``stack_limit`` functions fault once recursion exceeds the limit;
* in a ``pipeline(L)`` loop a read of an array element written during the
  previous ``L`` iterations observes the value from before that write;
* in an ``unroll(F)`` loop every ``F``-iteration block reads array values as
  of the block start;
* consecutive call statements in a ``dataflow(D)`` function run as
  cooperative tasks (fixed round-robin) over depth-``D`` FIFOs, and a state
  where every live task is blocked is a deadlock fault;
* division by zero yields 0 plus a fault event instead of aborting.
"""

from __future__ import annotations

import math
import sys
import threading
from collections import deque
from typing import Optional

from ..minic import ast as A
from ..minic.builtins import BUILTINS
from ..minic.compat import check_hw_compat
from ..minic.errors import MiniCError
from ..minic.types import BASE_TYPES, TypeSpec
from .arith import coerce
from .hwconfig import HardwareConfig
from .inputs import TestInput
from .trace import Event, ExecTrace

SOFTWARE, HARDWARE = "software", "hardware"
DEFAULT_BUDGET = 1_000_000
# MiniC frames; each costs several host frames.
HOST_MAX_DEPTH = 600
# Largest contiguous growth of a dynamic array; farther writes go sparse.
GROW_LIMIT = 1 << 16
ALLOC_LIMIT = 1 << 20

NORMAL, BREAK, CONTINUE, RETURN = 0, 1, 2, 3

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
threading.stack_size(64 * 1024 * 1024)


class Fault(Exception):
    def __init__(self, reason: str, symbol: str = "-", details: tuple = ()):
        super().__init__(f"{reason} at {symbol}")
        self.reason = reason
        self.symbol = symbol
        self.details = details


class BudgetExhausted(Exception):
    def __init__(self, reason: Optional[str] = None):
        super().__init__(reason or "step budget exhausted")
        self.reason = reason


class IncompatibleProgram(ValueError):
    """Hardware execution was requested for a program that fails the
    compatibility check."""


class InputShapeError(ValueError):
    pass


class _Abort(BaseException):
    pass


class _Exit(Exception):
    def __init__(self, code):
        self.code = code


class ArrayVal:
    __slots__ = ("data", "ndim", "sparse", "zero")

    def __init__(self, data: list, ndim: int, zero):
        self.data = data
        self.ndim = ndim
        self.sparse = {}
        self.zero = zero

    def snapshot(self) -> tuple:
        if self.ndim == 1:
            return tuple(self.data)
        return tuple(tuple(r) for r in self.data)


class ChanVal:
    __slots__ = ("name", "cap", "q", "spec")

    def __init__(self, name: str, cap: Optional[int], spec: TypeSpec):
        self.name = name
        self.cap = cap
        self.q = deque()
        self.spec = spec


class Runtime:
    __slots__ = ("mode", "budget", "ticks", "clock", "events", "globals", "printed", "rand_state")

    def __init__(self, mode: str, budget: int):
        self.mode = mode
        self.budget = budget
        self.ticks = 0
        self.clock = 0
        self.events = []
        self.globals = {}
        self.printed = []
        self.rand_state = 12345

    def emit(self, kind: str, symbol: str, values: tuple):
        self.clock += 1
        self.events.append(Event(self.clock + self.ticks, kind, symbol, values))


class _Window:
    """Visibility window of a pipelined or unrolled loop."""

    __slots__ = ("kind", "param", "iter", "log")

    def __init__(self, kind: str, param: int):
        self.kind = kind
        self.param = param
        self.iter = 0
        self.log = {}

    def threshold(self) -> int:
        if self.kind == "pipeline":
            return self.iter - self.param
        return self.iter - self.iter % self.param

    def read(self, key, current):
        entries = self.log.get(key)
        if not entries:
            return current
        last = entries[-1]
        if last[0] == self.iter:
            return last[2]
        thr = self.threshold()
        for it, _old, new in reversed(entries):
            if it < thr:
                return new
        return entries[0][1]

    def record(self, key, old, new):
        self.log.setdefault(key, []).append((self.iter, old, new))


class Ctx:
    """Per-task execution context."""

    __slots__ = ("rt", "windows", "depth", "total_depth", "task")

    def __init__(self, rt: Runtime, task=None, depth=None, total_depth: int = 0):
        self.rt = rt
        self.windows = []
        self.depth = dict(depth or {})
        self.total_depth = total_depth
        self.task = task


class Frame:
    __slots__ = ("v", "ctx", "ret")

    def __init__(self, ctx: Ctx, v: dict):
        self.v = v
        self.ctx = ctx
        self.ret = None


# ------------------------------------------------------------- cooperative tasks


class _Task:
    def __init__(self, k: int, call):
        self.k = k
        self.call = call
        self.done = False
        self.blocked = None
        self.error = None


class _Scheduler:
    MAIN = -1

    def __init__(self, invoke):
        self.cv = threading.Condition()
        self.turn = self.MAIN
        self.aborting = False
        self.invoke = invoke

    def _resume(self, t: _Task):
        with self.cv:
            self.turn = t.k
            self.cv.notify_all()
            self.cv.wait_for(lambda: self.turn == self.MAIN)

    def wait(self, t: _Task, chan: ChanVal, op: str):
        t.blocked = (chan, op)
        with self.cv:
            self.turn = self.MAIN
            self.cv.notify_all()
            self.cv.wait_for(lambda: self.turn == t.k)
        t.blocked = None
        if self.aborting:
            raise _Abort()

    def _body(self, t: _Task, parent: Ctx):
        with self.cv:
            self.cv.wait_for(lambda: self.turn == t.k)
        try:
            if self.aborting:
                raise _Abort()
            name, vals, probe = t.call
            ctx = Ctx(parent.rt, task=(self, t), depth=parent.depth, total_depth=parent.total_depth)
            self.invoke(ctx, name, vals, probe)
        except _Abort:
            pass
        except BaseException as e:  # surfaced in the scheduling thread
            t.error = e
        finally:
            t.done = True
            with self.cv:
                self.turn = self.MAIN
                self.cv.notify_all()

    @staticmethod
    def _ready(t: _Task) -> bool:
        if t.blocked is None:
            return True
        chan, op = t.blocked
        return bool(chan.q) if op == "pop" else len(chan.q) < chan.cap

    def run(self, parent: Ctx, calls: list):
        tasks = [_Task(k, c) for k, c in enumerate(calls)]
        threads = [threading.Thread(target=self._body, args=(t, parent), daemon=True) for t in tasks]
        for th in threads:
            th.start()
        n = len(tasks)
        nxt = 0
        try:
            while True:
                live = [t for t in tasks if not t.done]
                if not live:
                    return
                order = tasks[nxt:] + tasks[:nxt]
                pick = next((t for t in order if not t.done and self._ready(t)), None)
                if pick is None:
                    chan, op = live[0].blocked
                    raise Fault("fifo_deadlock", chan.name, (op, len(chan.q)))
                nxt = (pick.k + 1) % n
                self._resume(pick)
                if pick.error is not None:
                    raise pick.error
        finally:
            self.aborting = True
            for t in tasks:
                if not t.done:
                    self._resume(t)
            for th in threads:
                th.join()


# -------------------------------------------------------------------- compiler


class _FnInfo:
    def __init__(self, name: Optional[str], vars_: dict):
        self.name = name
        self.vars = vars_  # name -> (base, ndim, chan)
        self.spec = {}
        self.static = {}

    def q(self, name: str) -> str:
        return A.qualify(self.name, name)


class _CompiledFn:
    __slots__ = ("name", "params", "body", "template", "ret_spec")


def _truthy(v) -> bool:
    return v != 0


def _cdiv(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    return a / b


def _cmod(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return a - b * _cdiv(a, b)
    return math.fmod(a, b)


def _as_index(v, sym):
    if isinstance(v, float):
        if not math.isfinite(v):
            raise Fault("bad_index", sym, (v,))
        return math.trunc(v)
    return v


class Executable:
    """A program compiled for one execution mode."""

    def __init__(self, program: A.Program, mode: str = SOFTWARE,
                 cfg: Optional[HardwareConfig] = None, budget: int = DEFAULT_BUDGET):
        if mode not in (SOFTWARE, HARDWARE):
            raise ValueError(f"unknown mode {mode!r}")
        self.program = program
        self.mode = mode
        self.hw = mode == HARDWARE
        self.cfg = cfg if cfg is not None else (HardwareConfig.from_program(program) if self.hw else HardwareConfig())
        self.budget = budget
        if self.hw:
            report = check_hw_compat(program)
            if not report.ok:
                raise IncompatibleProgram("hardware execution needs a compatible program:\n" + report.to_log())
        self.globals_info = _FnInfo(None, {g.name: (g.base, len(g.sizes), g.chan) for g in program.globals})
        self._specs(self.globals_info)
        self.fns = {}
        for fn in program.functions.values():
            self.fns[fn.name] = self._compile_fn(fn)
        self.global_init = self._block(A.Block(program.globals), self.globals_info, count=False)
        self.entry = program.entry

    # ---- helpers
    def _specs(self, F: _FnInfo):
        for name, (base, _nd, chan) in F.vars.items():
            q = F.q(name)
            spec = BASE_TYPES[base]
            if self.hw and q in self.cfg.types:
                spec = self.cfg.types[q]
            F.spec[name] = spec
            if self.hw and q in self.cfg.static:
                F.static[name] = self.cfg.static[q]

    def _info(self, name: str, F: _FnInfo):
        if name in F.vars:
            return F, F.vars[name]
        if name in self.globals_info.vars:
            return self.globals_info, self.globals_info.vars[name]
        raise MiniCError(f"undeclared variable {name!r}")

    def _getter(self, name: str, F: _FnInfo):
        owner, _ = self._info(name, F)
        if owner is F and F.name is not None:
            def get(fr):
                return fr.v[name]
        else:
            def get(fr):
                return fr.ctx.rt.globals[name]
        return get

    def _setter(self, name: str, F: _FnInfo):
        owner, _ = self._info(name, F)
        if owner is F and F.name is not None:
            def put(fr, val):
                fr.v[name] = val
        else:
            def put(fr, val):
                fr.ctx.rt.globals[name] = val
        return put

    # ---- functions
    def _compile_fn(self, fn: A.Function) -> _CompiledFn:
        vars_ = {p.name: (p.base, len(p.dims), p.chan) for p in fn.params}
        for s in A.iter_stmts(fn.body):
            if isinstance(s, A.Decl):
                vars_[s.name] = (s.base, len(s.sizes), s.chan)
        F = _FnInfo(fn.name, vars_)
        self._specs(F)
        cf = _CompiledFn()
        cf.name = fn.name
        cf.template = {n: (0.0 if F.spec[n].kind in ("float", "fixed") else 0)
                       for n, (_b, nd, ch) in vars_.items() if not nd and not ch}
        cf.params = [(p.name, bool(p.dims) or p.chan, F.spec[p.name], p.probe, F.q(p.name)) for p in fn.params]
        cf.ret_spec = BASE_TYPES[fn.ret] if fn.ret else None
        loops = A.loops_of(fn)
        self._loop_ids = {id(lp): A.loop_id(fn.name, lp, k) for k, lp in enumerate(loops)}
        dataflow = self.hw and fn.name in self.cfg.dataflow
        cf.body = self._block(fn.body, F, dataflow=dataflow)
        return cf

    def invoke(self, ctx: Ctx, name: str, vals: list, probe: bool = False):
        cf = self.fns[name]
        rt = ctx.rt
        ctx.total_depth += 1
        d = ctx.depth.get(name, 0) + 1
        ctx.depth[name] = d
        try:
            if ctx.total_depth > HOST_MAX_DEPTH:
                raise BudgetExhausted("host_depth")
            if self.hw and name in self.cfg.stack_limit and d > self.cfg.stack_limit[name]:
                raise Fault("stack_overflow", name, (d, self.cfg.stack_limit[name]))
            if probe:
                rt.emit("call", name, (d,))
            fr = Frame(ctx, dict(cf.template))
            v = fr.v
            for (pname, byref, spec, pprobe, q), val in zip(cf.params, vals):
                if byref:
                    v[pname] = val
                else:
                    stored, tag = coerce(val, spec)
                    v[pname] = stored
                    if pprobe:
                        rt.emit("write", q, (stored, val, tag))
            r = cf.body(fr)
            ret = fr.ret if r == RETURN else None
        finally:
            ctx.depth[name] = d - 1
            ctx.total_depth -= 1
        if ret is None:
            return 0
        if cf.ret_spec is not None:
            ret = coerce(ret, cf.ret_spec)[0]
        return ret

    # ---- statements
    def _block(self, block: A.Block, F: _FnInfo, dataflow: bool = False, count: bool = True):
        stmts = []
        pending = []  # consecutive task calls in a dataflow body

        def flush():
            if len(pending) >= 2:
                stmts.append(self._task_group(list(pending), F))
            else:
                stmts.extend(self._stmt(s, F) for s in pending)
            pending.clear()

        for s in block.stmts:
            if isinstance(s, A.Directive):
                continue
            if dataflow and isinstance(s, A.ExprStmt) and isinstance(s.expr, A.Call) and s.expr.func in self.program.functions:
                pending.append(s)
                continue
            flush()
            stmts.append(self._stmt(s, F))
        flush()
        stmts = tuple(stmts)

        if not count:
            def run_block(fr):
                for st in stmts:
                    r = st(fr)
                    if r:
                        return r
                return NORMAL
            return run_block

        def run_block(fr):
            rt = fr.ctx.rt
            for st in stmts:
                rt.ticks += 1
                if rt.ticks > rt.budget:
                    raise BudgetExhausted()
                r = st(fr)
                if r:
                    return r
            return NORMAL
        return run_block

    def _task_group(self, stmts: list, F: _FnInfo):
        calls = [(s.expr.func, self._call_args(s.expr, F), s.expr.probe) for s in stmts]
        if not self.hw:
            raise AssertionError("task groups exist only in hardware mode")

        def run_group(fr):
            batch = [(name, [a(fr) for a in args], probe) for name, args, probe in calls]
            _Scheduler(self.invoke).run(fr.ctx, batch)
            return NORMAL
        return run_group

    def _stmt(self, s, F: _FnInfo):
        if isinstance(s, A.Decl):
            return self._decl(s, F)
        if isinstance(s, A.Assign):
            return self._assign(s, F)
        if isinstance(s, A.ExprStmt):
            e = self._expr(s.expr, F)

            def expr_stmt(fr):
                e(fr)
                return NORMAL
            return expr_stmt
        if isinstance(s, A.If):
            cond = self._expr(s.cond, F)
            then = self._block(s.then, F)
            orelse = self._block(s.orelse, F) if s.orelse is not None else None

            def if_stmt(fr):
                if cond(fr) != 0:
                    return then(fr)
                if orelse is not None:
                    return orelse(fr)
                return NORMAL
            return if_stmt
        if isinstance(s, (A.For, A.While)):
            return self._loop(s, F)
        if isinstance(s, A.Return):
            if s.value is None:
                def ret_none(fr):
                    fr.ret = None
                    return RETURN
                return ret_none
            val = self._expr(s.value, F)

            def ret(fr):
                fr.ret = val(fr)
                return RETURN
            return ret
        if isinstance(s, A.Break):
            return lambda fr: BREAK
        if isinstance(s, A.Continue):
            return lambda fr: CONTINUE
        raise MiniCError(f"cannot execute {type(s).__name__}")

    def _loop(self, s, F: _FnInfo):
        qid = self._loop_ids[id(s)]
        window = None
        if self.hw and qid in self.cfg.pipeline:
            window = ("pipeline", self.cfg.pipeline[qid])
        elif self.hw and qid in self.cfg.unroll:
            window = ("unroll", self.cfg.unroll[qid])
        is_for = isinstance(s, A.For)
        init = self._stmt(s.init, F) if is_for and s.init is not None else None
        cond = self._expr(s.cond, F) if s.cond is not None else None
        step = self._stmt(s.step, F) if is_for and s.step is not None else None
        body = self._block(s.body, F)
        probe = s.probe

        def loop(fr):
            ctx = fr.ctx
            rt = ctx.rt
            if init is not None:
                init(fr)
            w = None
            if window is not None:
                w = _Window(*window)
                ctx.windows.append(w)
            it = 0
            try:
                while True:
                    rt.ticks += 1
                    if rt.ticks > rt.budget:
                        raise BudgetExhausted()
                    if cond is not None and cond(fr) == 0:
                        break
                    if probe:
                        rt.emit("loop_iter", qid, (it,))
                    if w is not None:
                        w.iter = it
                    r = body(fr)
                    if r == BREAK:
                        break
                    if r == RETURN:
                        return RETURN
                    if step is not None:
                        step(fr)
                    it += 1
            finally:
                if w is not None:
                    ctx.windows.pop()
            return NORMAL
        return loop

    def _decl(self, s: A.Decl, F: _FnInfo):
        put = self._setter(s.name, F)
        q = F.q(s.name)
        spec = F.spec[s.name]
        probe = s.probe
        if s.chan:
            cap = None
            if self.hw and F.name in self.cfg.dataflow:
                cap = self.cfg.dataflow[F.name]

            def decl_chan(fr):
                put(fr, ChanVal(q, cap, spec))
                return NORMAL
            return decl_chan
        if s.sizes:
            zero = 0.0 if spec.kind in ("float", "fixed") else 0
            if isinstance(s.init, A.Call) and s.init.func == "alloc":
                size_exprs = [self._expr(a, F) for a in s.init.args]
            elif s.init is not None:
                raise MiniCError(f"array {s.name!r} can only be initialised with alloc()", s.line, s.col)
            else:
                if None in s.sizes:
                    raise MiniCError(f"array {s.name!r} needs a size or an alloc() initialiser", s.line, s.col)
                size_exprs = [self._expr(z, F) for z in s.sizes]

            def decl_array(fr):
                dims = [_as_index(z(fr), q) for z in size_exprs]
                total = 1
                for d in dims:
                    if d < 0:
                        raise Fault("bad_size", q, (d,))
                    total *= d
                if total > ALLOC_LIMIT:
                    raise Fault("alloc_limit", q, tuple(dims))
                if len(dims) == 1:
                    put(fr, ArrayVal([zero] * dims[0], 1, zero))
                else:
                    put(fr, ArrayVal([[zero] * dims[1] for _ in range(dims[0])], 2, zero))
                return NORMAL
            return decl_array
        init = self._expr(s.init, F) if s.init is not None else (lambda fr: 0)

        def decl_scalar(fr):
            raw = init(fr)
            stored, tag = coerce(raw, spec)
            put(fr, stored)
            if probe:
                fr.ctx.rt.emit("write", q, (stored, raw, tag))
            return NORMAL
        return decl_scalar

    def _assign(self, s: A.Assign, F: _FnInfo):
        t = s.target
        _owner, (_base, nd, ch) = self._info(t.name, F)
        owner = F if t.name in F.vars else self.globals_info
        spec = owner.spec[t.name]
        q = owner.q(t.name)
        val = self._expr(s.value, F)
        probe = s.probe
        if isinstance(t, A.Name):
            if nd or ch:
                raise MiniCError(f"cannot assign to array or channel {t.name!r}", s.line, s.col)
            put = self._setter(t.name, F)

            def assign(fr):
                raw = val(fr)
                stored, tag = coerce(raw, spec)
                put(fr, stored)
                if probe:
                    fr.ctx.rt.emit("write", q, (stored, raw, tag))
                return NORMAL
            return assign
        if len(t.indices) != nd:
            raise MiniCError(f"{t.name!r} has {nd} dimension(s)", s.line, s.col)
        get = self._getter(t.name, F)
        idx = [self._expr(i, F) for i in t.indices]
        bound = owner.static.get(t.name)
        hw = self.hw

        def assign_elem(fr):
            a = get(fr)
            ix = tuple(_as_index(i(fr), q) for i in idx)
            raw = val(fr)
            stored, tag = coerce(raw, spec)
            ctx = fr.ctx
            _check(ix, bound, q, hw)
            _store(a, ix, stored, ctx.windows[-1] if ctx.windows else None)
            if probe:
                ctx.rt.emit("array_access", q, ix)
                ctx.rt.emit("write", q, (stored, raw, tag))
            return NORMAL
        return assign_elem

    # ---- expressions
    def _call_args(self, c: A.Call, F: _FnInfo) -> list:
        fn = self.program.function(c.func)
        out = []
        for prm, arg in zip(fn.params, c.args):
            if prm.dims or prm.chan:
                if not isinstance(arg, A.Name):
                    raise MiniCError(f"argument for {prm.name!r} of {c.func} must be a variable", c.line, c.col)
                out.append(self._getter(arg.name, F))
            else:
                out.append(self._expr(arg, F))
        return out

    def _expr(self, e, F: _FnInfo):
        if isinstance(e, A.Num):
            v = e.value
            return lambda fr: v
        if isinstance(e, A.Name):
            _owner, (_b, nd, ch) = self._info(e.name, F)
            if nd or ch:
                raise MiniCError(f"array or channel {e.name!r} used as a value", e.line, e.col)
            return self._getter(e.name, F)
        if isinstance(e, A.Index):
            return self._index(e, F)
        if isinstance(e, A.Unary):
            x = self._expr(e.operand, F)
            if e.op == "-":
                return lambda fr: -x(fr)
            return lambda fr: 0 if x(fr) != 0 else 1
        if isinstance(e, A.Binary):
            return self._binary(e, F)
        if isinstance(e, A.Call):
            if e.func in self.program.functions:
                args = self._call_args(e, F)
                name, probe, invoke = e.func, e.probe, self.invoke

                def call(fr):
                    return invoke(fr.ctx, name, [a(fr) for a in args], probe)
                return call
            return self._builtin(e, F)
        raise MiniCError(f"cannot evaluate {type(e).__name__}")

    def _index(self, e: A.Index, F: _FnInfo):
        _owner, (_b, nd, _ch) = self._info(e.name, F)
        owner = F if e.name in F.vars else self.globals_info
        if len(e.indices) != nd:
            raise MiniCError(f"{e.name!r} has {nd} dimension(s)", e.line, e.col)
        get = self._getter(e.name, F)
        q = owner.q(e.name)
        bound = owner.static.get(e.name)
        hw = self.hw
        probe = e.probe
        if nd == 1:
            i0 = self._expr(e.indices[0], F)

            def index1(fr):
                a = get(fr)
                i = _as_index(i0(fr), q)
                ctx = fr.ctx
                if probe:
                    ctx.rt.emit("array_access", q, (i,))
                if i < 0 or (bound is not None and i >= bound):
                    _check((i,), bound, q, hw)
                d = a.data
                v = d[i] if i < len(d) else a.sparse.get(i, a.zero)
                if ctx.windows:
                    v = ctx.windows[-1].read((id(a), i), v)
                return v
            return index1
        i0 = self._expr(e.indices[0], F)
        i1 = self._expr(e.indices[1], F)

        def index2(fr):
            a = get(fr)
            ix = (_as_index(i0(fr), q), _as_index(i1(fr), q))
            ctx = fr.ctx
            if probe:
                ctx.rt.emit("array_access", q, ix)
            _check(ix, bound, q, hw)
            v = _load2(a, ix)
            if ctx.windows:
                v = ctx.windows[-1].read((id(a),) + ix, v)
            return v
        return index2

    def _binary(self, e: A.Binary, F: _FnInfo):
        l = self._expr(e.left, F)
        r = self._expr(e.right, F)
        op = e.op
        if op == "+":
            return lambda fr: l(fr) + r(fr)
        if op == "-":
            return lambda fr: l(fr) - r(fr)
        if op == "*":
            return lambda fr: l(fr) * r(fr)
        if op in ("/", "%"):
            fn = _cdiv if op == "/" else _cmod
            hw = self.hw

            def div(fr):
                a = l(fr)
                b = r(fr)
                if b == 0:
                    if not hw:
                        raise Fault("div_by_zero", op, (a,))
                    fr.ctx.rt.emit("fault", op, ("div_by_zero", a))
                    return 0.0 if isinstance(a, float) or isinstance(b, float) else 0
                return fn(a, b)
            return div
        if op == "&&":
            return lambda fr: 1 if (l(fr) != 0 and r(fr) != 0) else 0
        if op == "||":
            return lambda fr: 1 if (l(fr) != 0 or r(fr) != 0) else 0
        cmp = {
            "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
            "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
            ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
        }[op]
        return lambda fr: 1 if cmp(l(fr), r(fr)) else 0

    def _builtin(self, c: A.Call, F: _FnInfo):
        name = c.func
        if name not in BUILTINS:
            raise MiniCError(f"unknown function {name!r}", c.line, c.col)
        hw = self.hw
        probe = c.probe
        if name in ("len", "free", "resize", "push", "pop"):
            if not isinstance(c.args[0], A.Name):
                raise MiniCError(f"{name}() needs a variable as first argument", c.line, c.col)
            get = self._getter(c.args[0].name, F)
        if name == "len":
            dim = c.args[1].value if len(c.args) > 1 and isinstance(c.args[1], A.Num) else 0

            def length(fr):
                a = get(fr)
                if isinstance(a, ChanVal):
                    return len(a.q)
                if dim == 0:
                    return len(a.data)
                return len(a.data[0]) if a.data else 0
            return length
        if name == "push":
            val = self._expr(c.args[1], F)

            def push(fr):
                ch = get(fr)
                v = coerce(val(fr), ch.spec)[0]
                while ch.cap is not None and len(ch.q) >= ch.cap:
                    _block_on(fr.ctx, ch, "push")
                ch.q.append(v)
                if probe:
                    fr.ctx.rt.emit("fifo_op", ch.name, ("push", len(ch.q)))
                return 0
            return push
        if name == "pop":
            def pop(fr):
                ch = get(fr)
                while not ch.q:
                    if not hw or ch.cap is None and fr.ctx.task is None:
                        raise Fault("fifo_empty", ch.name, ())
                    _block_on(fr.ctx, ch, "pop")
                v = ch.q.popleft()
                if probe:
                    fr.ctx.rt.emit("fifo_op", ch.name, ("pop", len(ch.q)))
                return v
            return pop
        args = [self._expr(a, F) for a in c.args] if name not in ("free", "resize") else []
        if name == "abs":
            return lambda fr: abs(args[0](fr))
        if name == "min":
            return lambda fr: min(args[0](fr), args[1](fr))
        if name == "max":
            return lambda fr: max(args[0](fr), args[1](fr))
        if name == "alloc":
            raise MiniCError("alloc() may only initialise an array declaration", c.line, c.col)
        if name == "free":
            return lambda fr: 0
        if name == "resize":
            size = self._expr(c.args[1], F)

            def resize(fr):
                a = get(fr)
                n = _as_index(size(fr), "resize")
                if n < 0 or n > ALLOC_LIMIT:
                    raise Fault("bad_size", "resize", (n,))
                if a.ndim == 1:
                    a.data[n:] = []
                    a.data.extend([a.zero] * (n - len(a.data)))
                return 0
            return resize
        if name == "print":
            def prt(fr):
                fr.ctx.rt.printed.extend(a(fr) for a in args)
                return 0
            return prt
        if name in ("scan", "time"):
            return lambda fr: 0
        if name == "rand":
            def rand(fr):
                rt = fr.ctx.rt
                rt.rand_state = (1103515245 * rt.rand_state + 12345) % (1 << 31)
                return rt.rand_state >> 16
            return rand
        if name == "exit":
            def do_exit(fr):
                raise _Exit(args[0](fr))
            return do_exit
        raise MiniCError(f"builtin {name!r} is not executable", c.line, c.col)

    # ---- running
    def _bind_entry(self, inp: TestInput, rt: Runtime):
        fn = self.program.function(self.entry)
        if len(inp.values) != len(fn.params):
            raise InputShapeError(f"{self.entry} takes {len(fn.params)} inputs, got {len(inp.values)}")
        cf = self.fns[self.entry]
        vals = []
        for prm, (pname, _byref, spec, pprobe, q), v in zip(fn.params, cf.params, inp.values):
            if prm.chan:
                raise InputShapeError(f"entry parameter {prm.name!r} is a channel")
            nd = len(prm.dims)
            shape = len(TestInput((v,)).shape()[0])
            if nd != shape:
                raise InputShapeError(f"input for {prm.name!r} has {shape} dimension(s), expected {nd}")
            if nd == 0:
                vals.append(v)
                continue
            zero = 0.0 if spec.kind in ("float", "fixed") else 0
            if nd == 1:
                data = []
                for x in v:
                    stored, tag = coerce(x, spec)
                    data.append(stored)
                    if pprobe:
                        rt.emit("write", q, (stored, x, tag))
                vals.append(ArrayVal(data, 1, zero))
            else:
                rows = []
                for row in v:
                    out = []
                    for x in row:
                        stored, tag = coerce(x, spec)
                        out.append(stored)
                        if pprobe:
                            rt.emit("write", q, (stored, x, tag))
                    rows.append(out)
                vals.append(ArrayVal(rows, 2, zero))
        return vals

    def run(self, inp: TestInput, budget: Optional[int] = None) -> ExecTrace:
        rt = Runtime(self.mode, self.budget if budget is None else budget)
        trace = ExecTrace(self.mode, inp.to_line())
        ctx = Ctx(rt)
        try:
            vals = self._bind_entry(inp, rt)
            fr = Frame(ctx, {})
            self.global_init(fr)
            ret = self.invoke(ctx, self.entry, vals, False)
            arrays = tuple(v.snapshot() for v in vals if isinstance(v, ArrayVal))
            trace.outputs = (ret,) + arrays + tuple(rt.printed)
        except Fault as f:
            rt.emit("fault", f.symbol, (f.reason,) + f.details)
            trace.status, trace.reason = "faulted", f.reason
        except BudgetExhausted as b:
            trace.status, trace.reason = "budget_exhausted", b.reason
        except _Exit as x:
            trace.outputs = (x.code,) + tuple(rt.printed)
        trace.events = rt.events
        trace.steps = rt.ticks
        return trace


def _check(ix: tuple, bound, sym: str, hw: bool):
    for k, i in enumerate(ix):
        if i < 0:
            raise Fault("oob_static" if bound is not None else "oob", sym, ix)
    if bound is not None:
        b = bound if isinstance(bound, tuple) else (bound,)
        if ix[0] >= b[0] or (len(b) > 1 and len(ix) > 1 and ix[1] >= b[1]):
            raise Fault("oob_static", sym, ix + (bound,))


def _load2(a: ArrayVal, ix):
    i, j = ix
    d = a.data
    if i < len(d):
        row = d[i]
        if j < len(row):
            return row[j]
    return a.sparse.get(ix, a.zero)


def _store(a: ArrayVal, ix: tuple, v, window):
    d = a.data
    if a.ndim == 1:
        i = ix[0]
        if i < len(d):
            if window is not None:
                window.record((id(a), i), d[i], v)
            d[i] = v
        elif i < len(d) + GROW_LIMIT:
            if window is not None:
                window.record((id(a), i), a.sparse.get(i, a.zero), v)
            d.extend([a.zero] * (i + 1 - len(d)))
            for k in [k for k in a.sparse if k < len(d)]:
                d[k] = a.sparse.pop(k)
            d[i] = v
        else:
            if window is not None:
                window.record((id(a), i), a.sparse.get(i, a.zero), v)
            a.sparse[i] = v
        return
    i, j = ix
    if window is not None:
        window.record((id(a), i, j), _load2(a, ix), v)
    if i < len(d) + GROW_LIMIT and j < GROW_LIMIT:
        while len(d) <= i:
            d.append([a.zero] * (len(d[0]) if d else 0))
        row = d[i]
        if j >= len(row):
            row.extend([a.zero] * (j + 1 - len(row)))
        row[j] = v
    else:
        a.sparse[ix] = v


def _block_on(ctx: Ctx, ch: ChanVal, op: str):
    if ctx.task is None:
        raise Fault("fifo_deadlock", ch.name, (op, len(ch.q)))
    sched, task = ctx.task
    sched.wait(task, ch, op)


# ------------------------------------------------------------------- front door


def run_software(p: A.Program, inp: TestInput, budget: int = DEFAULT_BUDGET) -> ExecTrace:
    return Executable(p, SOFTWARE, budget=budget).run(inp)


def run_hardware(p: A.Program, cfg: Optional[HardwareConfig], inp: TestInput,
                 budget: int = DEFAULT_BUDGET) -> ExecTrace:
    return Executable(p, HARDWARE, cfg, budget=budget).run(inp)
