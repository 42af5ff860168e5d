"""Hardware-compatibility check: the closed list of constructs a synthesis
flow rejects, reported as a line-oriented error log."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast as A
from .builtins import BUILTINS, HW_IMPORTS

MESSAGES = {
    "E_DYNAMIC_ALLOC": "dynamic memory allocation via '{name}' is not synthesizable; use a statically sized array",
    "E_DYNAMIC_FREE": "heap deallocation via '{name}' is not synthesizable; static arrays need no release",
    "E_DYNAMIC_RESIZE": "runtime array resizing via '{name}' is not synthesizable; fix the array capacity",
    "E_CONSOLE_IO": "console I/O call '{name}' has no hardware equivalent; pass data through ports",
    "E_NONDETERMINISTIC_BUILTIN": "nondeterministic library call '{name}' cannot be synthesized",
    "E_SYSTEM_CALL": "system call '{name}' cannot be synthesized; return a status value instead",
    "E_UNBOUNDED_RECURSION": "recursive function '{name}' has no stack bound; add a stack_limit directive",
    "E_UNSIZED_ARRAY": "array parameter '{name}' has no static size; declare its capacity",
    "E_VARIABLE_LENGTH_ARRAY": "array '{name}' has a size unknown at compile time; declare a static capacity",
    "E_UNSUPPORTED_HEADER": "library '{name}' is not supported by the synthesis tool",
}


@dataclass(frozen=True, order=True)
class CompatError:
    line: int
    col: int
    code: str
    message: str = field(compare=False)

    def to_log(self) -> str:
        return f"ERROR {self.code} {self.line}:{self.col} {self.message}"


@dataclass(frozen=True)
class CompatReport:
    errors: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_log(self) -> str:
        return "".join(e.to_log() + "\n" for e in self.errors)

    def __len__(self):
        return len(self.errors)


def _err(code, name, line, col) -> CompatError:
    return CompatError(line, col, code, MESSAGES[code].format(name=name))


def _is_const(e) -> bool:
    if isinstance(e, A.Num):
        return True
    if isinstance(e, A.Unary):
        return _is_const(e.operand)
    if isinstance(e, A.Binary):
        return _is_const(e.left) and _is_const(e.right)
    return False


def _calls(fn: A.Function):
    for s in A.iter_stmts(fn.body):
        exprs = list(A.stmt_exprs(s))
        if isinstance(s, A.Assign) and isinstance(s.target, A.Index):
            exprs = list(s.target.indices) + [s.value]
        for e in exprs:
            for sub in A.iter_expr(e):
                if isinstance(sub, A.Call):
                    yield sub


def recursive_components(p: A.Program) -> list:
    """Strongly connected call-graph components that contain a cycle."""
    fns = p.functions
    graph = {n: sorted({c.func for c in _calls(f) if c.func in fns}) for n, f in fns.items()}
    index: dict = {}
    low: dict = {}
    stack: list = []
    on: set = set()
    comps: list = []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in graph[v]:
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            if len(comp) > 1 or v in graph[v]:
                comps.append(sorted(comp))

    for v in fns:
        if v not in index:
            visit(v)
    return comps


def check_hw_compat(p: A.Program) -> CompatReport:
    """Report every construct in ``p`` that a hardware flow rejects."""
    errors = []
    bound = {(b.target, b.directive) for b in p.directives}
    static = {t for t, d in bound if d == "static_array"}
    limited = {t for t, d in bound if d == "stack_limit"}

    for imp in p.imports:
        if imp.name not in HW_IMPORTS:
            errors.append(_err("E_UNSUPPORTED_HEADER", imp.name, imp.line, imp.col))

    for g in p.globals:
        if g.sizes and g.name not in static and not all(z is not None and _is_const(z) for z in g.sizes):
            errors.append(_err("E_VARIABLE_LENGTH_ARRAY", g.name, g.line, g.col))

    for fn in p.functions.values():
        for prm in fn.params:
            if prm.dims and None in prm.dims and A.qualify(fn.name, prm.name) not in static:
                errors.append(_err("E_UNSIZED_ARRAY", prm.name, prm.line, prm.col))
        for s in A.iter_stmts(fn.body):
            if isinstance(s, A.Decl) and s.sizes:
                dynamic_init = isinstance(s.init, A.Call) and s.init.func == "alloc"
                fixed = all(z is not None and _is_const(z) for z in s.sizes)
                if not fixed and not dynamic_init and A.qualify(fn.name, s.name) not in static:
                    errors.append(_err("E_VARIABLE_LENGTH_ARRAY", s.name, s.line, s.col))
        for c in _calls(fn):
            if c.func in BUILTINS and BUILTINS[c.func][2]:
                errors.append(_err(BUILTINS[c.func][2], c.func, c.line, c.col))

    for comp in recursive_components(p):
        if not any(f in limited for f in comp):
            head = p.functions[comp[0]]
            errors.append(_err("E_UNBOUNDED_RECURSION", head.name, head.line, head.col))

    return CompatReport(tuple(sorted(errors)))
