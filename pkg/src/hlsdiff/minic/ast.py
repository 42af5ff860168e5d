"""MiniC abstract syntax tree.

All nodes are frozen dataclasses. Source positions are carried for error
messages but excluded from equality, so a reparsed pretty-print compares
equal to the original tree.

The ``probe`` flag on a node marks it as instrumented: the interpreter emits
a trace event whenever a probed node executes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .types import BASE_TYPES, TypeSpec


def _pos():
    return field(default=0, compare=False, repr=False)


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Num:
    value: Union[int, float]
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Name:
    name: str
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Index:
    name: str
    indices: tuple
    probe: bool = False
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    probe: bool = False
    line: int = _pos()
    col: int = _pos()


Expr = Union[Num, Name, Index, Unary, Binary, Call]

# ----------------------------------------------------------------- statements


@dataclass(frozen=True)
class Directive:
    """A ``@name(args)`` annotation exactly as written."""

    name: str
    args: tuple
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Decl:
    """Variable declaration. ``sizes`` holds one entry per array dimension;
    ``None`` marks an unsized dimension (``int a[]``)."""

    base: str
    name: str
    sizes: tuple = ()
    init: Optional[Expr] = None
    chan: bool = False
    probe: bool = False
    line: int = _pos()
    col: int = _pos()

    @property
    def is_array(self) -> bool:
        return bool(self.sizes)


@dataclass(frozen=True)
class Assign:
    target: Union[Name, Index]
    value: Expr
    probe: bool = False
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Block:
    stmts: tuple = ()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Block
    orelse: Optional[Block] = None
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class For:
    label: Optional[str]
    init: Optional[Union[Decl, Assign]]
    cond: Optional[Expr]
    step: Optional[Assign]
    body: Block
    probe: bool = False
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class While:
    label: Optional[str]
    cond: Expr
    body: Block
    probe: bool = False
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Break:
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Continue:
    line: int = _pos()
    col: int = _pos()


Stmt = Union[Directive, Decl, Assign, ExprStmt, If, For, While, Return, Break, Continue]

# ------------------------------------------------------------------ top level


@dataclass(frozen=True)
class Param:
    name: str
    base: str
    dims: tuple = ()
    chan: bool = False
    probe: bool = False
    line: int = _pos()
    col: int = _pos()

    @property
    def is_array(self) -> bool:
        return bool(self.dims)


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple
    ret: Optional[str]
    body: Block
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Import:
    name: str
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class DirectiveBinding:
    """A directive resolved to its target.

    ``target`` is the qualified symbol: ``func::var`` for locals and
    parameters, ``func::label`` for loops, a bare name for globals and
    functions.
    """

    target: str
    directive: str
    params: tuple
    line: int = _pos()
    col: int = _pos()


@dataclass(frozen=True)
class Program:
    items: tuple
    entry: str
    directives: tuple = ()

    @property
    def functions(self) -> dict:
        return {it.name: it for it in self.items if isinstance(it, Function)}

    @property
    def globals(self) -> tuple:
        return tuple(it for it in self.items if isinstance(it, Decl))

    @property
    def imports(self) -> tuple:
        return tuple(it for it in self.items if isinstance(it, Import))

    def function(self, name: str) -> Function:
        return self.functions[name]


def declared_type(base: str) -> TypeSpec:
    return BASE_TYPES[base]


def qualify(func: Optional[str], name: str) -> str:
    return f"{func}::{name}" if func else name


def split_qualified(qname: str) -> tuple:
    if "::" in qname:
        func, name = qname.split("::", 1)
        return func, name
    return None, qname


# ------------------------------------------------------------------- walking


def iter_stmts(block: Block):
    """Yield every statement in ``block`` depth-first, in source order."""
    for s in block.stmts:
        yield s
        if isinstance(s, If):
            yield from iter_stmts(s.then)
            if s.orelse is not None:
                yield from iter_stmts(s.orelse)
        elif isinstance(s, For):
            if s.init is not None:
                yield s.init
            if s.step is not None:
                yield s.step
            yield from iter_stmts(s.body)
        elif isinstance(s, While):
            yield from iter_stmts(s.body)


def stmt_exprs(s) -> tuple:
    """Expressions directly owned by a statement (not nested statements)."""
    if isinstance(s, Decl):
        return tuple(e for e in s.sizes if e is not None) + ((s.init,) if s.init is not None else ())
    if isinstance(s, Assign):
        tgt = s.target.indices if isinstance(s.target, Index) else ()
        return tuple(tgt) + (s.value,)
    if isinstance(s, ExprStmt):
        return (s.expr,)
    if isinstance(s, If):
        return (s.cond,)
    if isinstance(s, (For,)):
        return (s.cond,) if s.cond is not None else ()
    if isinstance(s, While):
        return (s.cond,)
    if isinstance(s, Return):
        return (s.value,) if s.value is not None else ()
    return ()


def iter_expr(e):
    """Yield ``e`` and all sub-expressions, pre-order."""
    yield e
    if isinstance(e, Index):
        for i in e.indices:
            yield from iter_expr(i)
    elif isinstance(e, Unary):
        yield from iter_expr(e.operand)
    elif isinstance(e, Binary):
        yield from iter_expr(e.left)
        yield from iter_expr(e.right)
    elif isinstance(e, Call):
        for a in e.args:
            yield from iter_expr(a)


def loops_of(fn: Function) -> list:
    """Loops of ``fn`` in source order."""
    return [s for s in iter_stmts(fn.body) if isinstance(s, (For, While))]


def loop_id(func: str, loop, ordinal: int) -> str:
    """Stable qualified id of a loop: its label, or ``loop<k>`` by ordinal."""
    return qualify(func, loop.label if loop.label else f"loop{ordinal}")
