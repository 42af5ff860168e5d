"""Variable-level dependency graph and backward slicing.

Nodes are qualified variable names (``func::var``, bare for globals). Each
function with a return value also gets a ``func::return`` node that feeds
the result of every call to it. The graph is flow-insensitive and has no
control-dependence edges; an array is a single node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .minic import ast as A


class UnknownTarget(KeyError):
    pass


RETURN = "return"


@dataclass(frozen=True)
class DepGraph:
    V: frozenset
    E: frozenset  # (u, v): u influences v
    types: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        for u, v in self.E:
            if u not in self.V or v not in self.V:
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside V")

    def preds(self) -> dict:
        out = {v: set() for v in self.V}
        for u, v in self.E:
            out[v].add(u)
        return out

    def resolve(self, name: str, func: Optional[str] = None) -> str:
        """Map a possibly unqualified name to a node."""
        if name in self.V:
            return name
        if func is not None and A.qualify(func, name) in self.V:
            return A.qualify(func, name)
        hits = sorted(v for v in self.V if A.split_qualified(v)[1] == name)
        if len(hits) == 1:
            return hits[0]
        if not hits:
            raise UnknownTarget(name)
        raise UnknownTarget(f"{name} is ambiguous: {', '.join(hits)}")

    def induced(self, nodes) -> "DepGraph":
        nodes = frozenset(nodes)
        return DepGraph(nodes, frozenset((u, v) for u, v in self.E if u in nodes and v in nodes),
                        {k: t for k, t in self.types.items() if k in nodes})


@dataclass(frozen=True)
class KeyVariableSet:
    target: str
    members: frozenset
    frontier: frozenset
    iterations: int = 0
    types: dict = field(default_factory=dict, compare=False, hash=False)

    def short_names(self) -> set:
        return {A.split_qualified(m)[1] for m in self.members}


def _uses(e, functions) -> tuple:
    """Variables read by ``e`` and user functions whose results it uses.
    Arguments of user calls are excluded; they reach the result through
    the callee."""
    names, callees = set(), set()

    def walk(x):
        if isinstance(x, A.Name):
            names.add(x.name)
        elif isinstance(x, A.Index):
            names.add(x.name)
            for i in x.indices:
                walk(i)
        elif isinstance(x, A.Unary):
            walk(x.operand)
        elif isinstance(x, A.Binary):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, A.Call):
            if x.func in functions:
                callees.add(x.func)
            else:
                for a in x.args:
                    walk(a)

    walk(e)
    return names, callees


def _user_calls(e, functions):
    for sub in A.iter_expr(e):
        if isinstance(sub, A.Call) and sub.func in functions:
            yield sub


def build_dep_graph(p: A.Program) -> DepGraph:
    functions = p.functions
    V, E, types = set(), set(), {}
    gnames = {g.name for g in p.globals}
    for g in p.globals:
        V.add(g.name)
        types[g.name] = g.base

    def declare(q, base):
        V.add(q)
        types[q] = base

    for fn in functions.values():
        for prm in fn.params:
            declare(A.qualify(fn.name, prm.name), prm.base)
        for s in A.iter_stmts(fn.body):
            if isinstance(s, A.Decl):
                declare(A.qualify(fn.name, s.name), s.base)
        if fn.ret:
            declare(A.qualify(fn.name, RETURN), fn.ret)

    for fn in functions.values():
        local = {prm.name for prm in fn.params}
        local |= {s.name for s in A.iter_stmts(fn.body) if isinstance(s, A.Decl)}

        def q(name, _fn=fn, _local=local):
            return A.qualify(_fn.name, name) if name in _local or name not in gnames else name

        def flow(exprs, target):
            for e in exprs:
                names, callees = _uses(e, functions)
                for n in names:
                    E.add((q(n), target))
                for c in callees:
                    if functions[c].ret:
                        E.add((A.qualify(c, RETURN), target))

        def bind_args(e):
            for call in _user_calls(e, functions):
                callee = functions[call.func]
                for prm, arg in zip(callee.params, call.args):
                    formal = A.qualify(callee.name, prm.name)
                    if (prm.dims or prm.chan) and isinstance(arg, A.Name):
                        E.add((q(arg.name), formal))
                        E.add((formal, q(arg.name)))
                    else:
                        flow([arg], formal)

        for s in A.iter_stmts(fn.body):
            for e in A.stmt_exprs(s):
                bind_args(e)
                # push(c, v): v flows into the channel
                for sub in A.iter_expr(e):
                    if isinstance(sub, A.Call) and sub.func == "push" and isinstance(sub.args[0], A.Name):
                        flow(sub.args[1:], q(sub.args[0].name))
            if isinstance(s, A.Decl):
                tgt = q(s.name)
                flow([x for x in s.sizes if x is not None] + ([s.init] if s.init is not None else []), tgt)
            elif isinstance(s, A.Assign):
                tgt = q(s.target.name)
                idx = list(s.target.indices) if isinstance(s.target, A.Index) else []
                flow(idx + [s.value], tgt)
            elif isinstance(s, A.Return) and s.value is not None and fn.ret:
                flow([s.value], A.qualify(fn.name, RETURN))

    return DepGraph(frozenset(V), frozenset(E), types)


def backward_slice(g: DepGraph, x: str, func: Optional[str] = None) -> KeyVariableSet:
    """Least fixed point of ``S = S ∪ preds(S)`` starting from ``{x}``."""
    x = g.resolve(x, func)
    preds = g.preds()
    S = {x}
    frontier_step = {x}
    iterations = 0
    while True:
        new = {u for v in frontier_step for u in preds[v]} - S
        if not new:
            break
        S |= new
        frontier_step = new
        iterations += 1
    members = frozenset(S)
    frontier = frozenset(v for v in members if not preds[v])
    return KeyVariableSet(x, members, frontier, iterations, {k: g.types[k] for k in members if k in g.types})


def slice_program(p: A.Program, target: Optional[str] = None) -> KeyVariableSet:
    """Slice ``target`` (default: the entry function's return value)."""
    g = build_dep_graph(p)
    if target is None:
        target = A.qualify(p.entry, RETURN)
    return backward_slice(g, target, p.entry)

