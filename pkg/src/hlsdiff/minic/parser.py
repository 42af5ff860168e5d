"""Recursive-descent parser for MiniC plus directive binding.

Grammar sketch::

    program   := (directive | import | function | decl)*
    directive := '@' IDENT '(' arg (',' arg)* ')'
    function  := 'fn' IDENT '(' [param (',' param)*] ')' [':' base] block
    param     := ['probe'] IDENT ':' (base ('[' [INT] ']')* | 'chan' '<' base '>')
    decl      := ['probe'] (base | 'chan' '<' base '>') IDENT ('[' [expr] ']')* ['=' expr] ';'
    stmt      := directive | decl | [label ':'] loop | if | return | break | continue
               | lvalue ('=' | '+=' | ...) expr ';' | lvalue ('++' | '--') ';' | call ';'
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from . import ast as A
from .builtins import BUILTINS
from .errors import (
    ConflictingDirective,
    DuplicateSymbol,
    InvalidDirectiveParam,
    MiniCSyntaxError,
    UndeclaredSymbol,
    UnknownDirective,
    UnresolvedDirectiveTarget,
)
from .lexer import Token, tokenize

BASES = ("int", "uint", "float")

# directive name -> (number of numeric params allowed (min, max), target kind)
DIRECTIVES = {
    "width": ((1, 1), "var"),
    "fixed": ((2, 2), "var"),
    "static_array": ((1, 1), "array"),
    "pipeline": ((1, 1), "loop"),
    "unroll": ((1, 1), "loop"),
    "dataflow": ((1, 1), "func"),
    "stack_limit": ((1, 1), "func"),
}

_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]

_COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%"}


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0

    # ---- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, msg: str):
        raise MiniCSyntaxError(msg, self.tok.line, self.tok.col)

    # ---- top level
    def program(self) -> list:
        items = []
        while self.tok.kind != "eof":
            if self.at("@"):
                items.append(self.directive())
            elif self.at("import"):
                t = self.advance()
                name = self.expect_ident().text
                self.expect(";")
                items.append(A.Import(name, line=t.line, col=t.col))
            elif self.at("fn"):
                items.append(self.function())
            elif self.tok.text in BASES or self.at("chan") or self.at("probe"):
                items.append(self.decl())
            else:
                self.error(f"unexpected {self.tok.text!r} at top level")
        return items

    def directive(self) -> A.Directive:
        t = self.expect("@")
        name = self.expect_ident().text
        self.expect("(")
        args = []
        while True:
            a = self.tok
            if a.kind == "int":
                args.append(int(a.text, 0))
            elif a.kind == "ident":
                args.append(a.text)
            elif a.kind == "op" and a.text == "-" and self.peek().kind == "int":
                self.advance()
                args.append(-int(self.tok.text, 0))
            else:
                self.error("directive arguments must be identifiers or integers")
            self.advance()
            if self.at(","):
                self.advance()
                continue
            break
        self.expect(")")
        return A.Directive(name, tuple(args), line=t.line, col=t.col)

    def function(self) -> A.Function:
        t = self.expect("fn")
        name = self.expect_ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                params.append(self.param())
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect(")")
        ret = None
        if self.at(":"):
            self.advance()
            if self.tok.text not in BASES:
                self.error("expected a scalar return type")
            ret = self.advance().text
        body = self.block()
        return A.Function(name, tuple(params), ret, body, line=t.line, col=t.col)

    def param(self) -> A.Param:
        probe = False
        if self.at("probe"):
            self.advance()
            probe = True
        t = self.expect_ident()
        self.expect(":")
        if self.at("chan"):
            base = self.chan_type()
            return A.Param(t.text, base, (), chan=True, probe=probe, line=t.line, col=t.col)
        if self.tok.text not in BASES:
            self.error("expected a type")
        base = self.advance().text
        dims = []
        while self.at("["):
            self.advance()
            if self.tok.kind == "int":
                dims.append(int(self.advance().text, 0))
            else:
                dims.append(None)
            self.expect("]")
        return A.Param(t.text, base, tuple(dims), probe=probe, line=t.line, col=t.col)

    def chan_type(self) -> str:
        self.expect("chan")
        self.expect("<")
        if self.tok.text not in BASES:
            self.error("expected channel element type")
        base = self.advance().text
        self.expect(">")
        return base

    def block(self) -> A.Block:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            stmts.append(self.statement())
        self.expect("}")
        return A.Block(tuple(stmts))

    # ---- statements
    def decl(self, need_semi: bool = True) -> A.Decl:
        probe = False
        t = self.tok
        if self.at("probe"):
            self.advance()
            probe = True
        chan = False
        if self.at("chan"):
            base = self.chan_type()
            chan = True
        else:
            if self.tok.text not in BASES:
                self.error("expected a type")
            base = self.advance().text
        name = self.expect_ident().text
        sizes = []
        while self.at("["):
            self.advance()
            sizes.append(None if self.at("]") else self.expr())
            self.expect("]")
        init = None
        if self.at("="):
            self.advance()
            init = self.expr()
        if need_semi:
            self.expect(";")
        return A.Decl(base, name, tuple(sizes), init, chan=chan, probe=probe, line=t.line, col=t.col)

    def _is_decl_start(self, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind == "kw" and t.text in BASES + ("chan",)

    def statement(self):
        t = self.tok
        if self.at("@"):
            return self.directive()
        probe = False
        if self.at("probe") and (
            self._is_decl_start(1)
            or self.peek().text in ("for", "while")
            or (self.peek().kind == "ident" and self.peek(2).text == ":")
        ):
            self.advance()
            probe = True
        if self._is_decl_start():
            d = self.decl()
            return replace(d, probe=probe) if probe else d
        label = None
        if self.tok.kind == "ident" and self.peek().text == ":" and self.peek().kind == "op":
            label = self.advance().text
            self.advance()
            if not (self.at("for") or self.at("while")):
                self.error("labels may only precede loops")
        if self.at("for"):
            return self.for_stmt(label, probe, t)
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            body = self.block()
            return A.While(label, cond, body, probe=probe, line=t.line, col=t.col)
        if self.at("if"):
            return self.if_stmt()
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return A.Return(value, line=t.line, col=t.col)
        if self.at("break"):
            self.advance()
            self.expect(";")
            return A.Break(line=t.line, col=t.col)
        if self.at("continue"):
            self.advance()
            self.expect(";")
            return A.Continue(line=t.line, col=t.col)
        s = self.simple()
        self.expect(";")
        return s

    def for_stmt(self, label, probe, t):
        self.expect("for")
        self.expect("(")
        init = None
        if not self.at(";"):
            init = self.decl(need_semi=False) if self._is_decl_start() or (
                self.at("probe") and self._is_decl_start(1)) else self.simple()
        self.expect(";")
        cond = None if self.at(";") else self.expr()
        self.expect(";")
        step = None if self.at(")") else self.simple()
        self.expect(")")
        body = self.block()
        return A.For(label, init, cond, step, body, probe=probe, line=t.line, col=t.col)

    def if_stmt(self):
        t = self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = None
        if self.at("else"):
            self.advance()
            if self.at("if"):
                orelse = A.Block((self.if_stmt(),))
            else:
                orelse = self.block()
        return A.If(cond, then, orelse, line=t.line, col=t.col)

    def simple(self):
        """Assignment, increment, or call expression statement (no ';')."""
        t = self.tok
        lhs = self.expr()
        probe = False
        if isinstance(lhs, _ProbedName):
            probe, lhs = True, A.Name(lhs.name, line=lhs.line, col=lhs.col)
        elif isinstance(lhs, A.Index) and lhs.probe and (
            self.at("=") or self.tok.text in _COMPOUND or self.at("++") or self.at("--")
        ):
            probe, lhs = True, replace(lhs, probe=False)
        if self.at("="):
            self.advance()
            return A.Assign(self._lvalue(lhs), self.expr(), probe=probe, line=t.line, col=t.col)
        if self.tok.kind == "op" and self.tok.text in _COMPOUND:
            op = _COMPOUND[self.advance().text]
            target = self._lvalue(lhs)
            value = A.Binary(op, target, self.expr(), line=t.line, col=t.col)
            return A.Assign(target, value, probe=probe, line=t.line, col=t.col)
        if self.at("++") or self.at("--"):
            op = "+" if self.advance().text == "++" else "-"
            target = self._lvalue(lhs)
            value = A.Binary(op, target, A.Num(1, line=t.line, col=t.col), line=t.line, col=t.col)
            return A.Assign(target, value, probe=probe, line=t.line, col=t.col)
        if isinstance(lhs, A.Call):
            return A.ExprStmt(lhs, line=t.line, col=t.col)
        raise MiniCSyntaxError("expression statement must be a call or an assignment", t.line, t.col)

    def _lvalue(self, e):
        if isinstance(e, (A.Name, A.Index)):
            return e
        raise MiniCSyntaxError("invalid assignment target", self.tok.line, self.tok.col)

    # ---- expressions
    def expr(self, level: int = 0):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            t = self.advance()
            right = self.expr(level + 1)
            left = A.Binary(t.text, left, right, line=t.line, col=t.col)
        return left

    def unary(self):
        t = self.tok
        if self.tok.kind == "op" and self.tok.text in ("-", "!"):
            self.advance()
            return A.Unary(t.text, self.unary(), line=t.line, col=t.col)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.Num(int(t.text, 0), line=t.line, col=t.col)
        if t.kind == "float":
            self.advance()
            return A.Num(float(t.text), line=t.line, col=t.col)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        probe = False
        if self.at("probe"):
            self.advance()
            probe = True
            t = self.tok
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.expr())
                        if self.at(","):
                            self.advance()
                            continue
                        break
                self.expect(")")
                return A.Call(t.text, tuple(args), probe=probe, line=t.line, col=t.col)
            if self.at("["):
                indices = []
                while self.at("["):
                    self.advance()
                    indices.append(self.expr())
                    self.expect("]")
                return A.Index(t.text, tuple(indices), probe=probe, line=t.line, col=t.col)
            if probe:
                return _ProbedName(t.text, line=t.line, col=t.col)
            return A.Name(t.text, line=t.line, col=t.col)
        self.error(f"unexpected {t.text or 'end of input'!r} in expression")


class _ProbedName(A.Name):
    """Parser-internal marker for ``probe x = ...`` targets."""


# ------------------------------------------------------------------ binding


class _FuncScope:
    def __init__(self, fn: A.Function):
        self.fn = fn
        self.vars: dict = {}
        self.labels: set = set()
        for p in fn.params:
            if p.name in self.vars:
                raise DuplicateSymbol(f"parameter {p.name!r} declared twice in {fn.name}", p.line, p.col)
            self.vars[p.name] = (p.base, len(p.dims), p.chan)
        for s in A.iter_stmts(fn.body):
            if isinstance(s, A.Decl):
                sig = (s.base, len(s.sizes), s.chan)
                prev = self.vars.get(s.name)
                if prev is not None and prev != sig:
                    raise DuplicateSymbol(
                        f"{s.name!r} redeclared with a different type in {fn.name}", s.line, s.col)
                self.vars[s.name] = sig
            elif isinstance(s, (A.For, A.While)) and s.label:
                if s.label in self.labels:
                    raise DuplicateSymbol(f"loop label {s.label!r} used twice in {fn.name}", s.line, s.col)
                self.labels.add(s.label)


def _check_names(prog_items, scopes: dict, globals_: dict, functions: dict):
    def check_expr(e, scope):
        for sub in A.iter_expr(e):
            if isinstance(sub, (A.Name, A.Index)):
                if sub.name not in scope.vars and sub.name not in globals_:
                    raise UndeclaredSymbol(f"undeclared variable {sub.name!r}", sub.line, sub.col)
            elif isinstance(sub, A.Call):
                if sub.func in functions:
                    want = len(functions[sub.func].params)
                    if len(sub.args) != want:
                        raise MiniCSyntaxError(
                            f"{sub.func} expects {want} arguments, got {len(sub.args)}", sub.line, sub.col)
                elif sub.func in BUILTINS:
                    lo, hi, _ = BUILTINS[sub.func]
                    if not lo <= len(sub.args) <= hi:
                        raise MiniCSyntaxError(f"bad argument count for builtin {sub.func}", sub.line, sub.col)
                else:
                    raise UndeclaredSymbol(f"unknown function {sub.func!r}", sub.line, sub.col)

    for scope in scopes.values():
        for s in A.iter_stmts(scope.fn.body):
            for e in A.stmt_exprs(s):
                check_expr(e, scope)
            if isinstance(s, A.Assign):
                check_expr(s.target, scope)


def _numeric(d: A.Directive, count: tuple) -> tuple:
    nums = d.args[1:]
    lo, hi = count
    if d.name in ("width", "fixed"):
        # trailing signedness keyword is optional for fixed, required for width
        if nums and nums[-1] in ("signed", "unsigned"):
            nums = nums[:-1]
        elif d.name == "width":
            raise InvalidDirectiveParam("@width needs a signedness (signed|unsigned)", d.line, d.col)
    if not lo <= len(nums) <= hi or not all(isinstance(n, int) for n in nums):
        raise InvalidDirectiveParam(f"@{d.name} takes {lo} numeric parameter(s)", d.line, d.col)
    if d.name == "fixed":
        w, i = nums
        if not 1 <= w <= 64 or not 0 <= i <= w:
            raise InvalidDirectiveParam(f"@fixed needs 1 <= W <= 64 and 0 <= I <= W, got ({w}, {i})", d.line, d.col)
    else:
        if any(n <= 0 for n in nums):
            raise InvalidDirectiveParam(f"@{d.name} parameters must be strictly positive", d.line, d.col)
        if d.name == "width" and nums[0] > 64:
            raise InvalidDirectiveParam("@width supports at most 64 bits", d.line, d.col)
    return tuple(nums)


def _bind_directive(d: A.Directive, func: Optional[str], scopes, globals_, functions) -> A.DirectiveBinding:
    if d.name not in DIRECTIVES:
        raise UnknownDirective(f"unknown directive @{d.name}", d.line, d.col)
    count, kind = DIRECTIVES[d.name]
    if not d.args or not isinstance(d.args[0], str):
        raise InvalidDirectiveParam(f"@{d.name} needs a target name first", d.line, d.col)
    target = d.args[0]
    nums = _numeric(d, count)
    params = nums
    if d.name == "width":
        params = nums + (d.args[-1] == "signed",)
    elif d.name == "fixed":
        params = nums + (d.args[-1] != "unsigned",)
    scope = scopes.get(func) if func else None
    if kind in ("var", "array"):
        sig = None
        qname = None
        if scope is not None and target in scope.vars:
            sig, qname = scope.vars[target], A.qualify(func, target)
        elif target in globals_:
            sig, qname = globals_[target], target
        if sig is None:
            raise UnresolvedDirectiveTarget(f"@{d.name} target {target!r} is not a declared variable", d.line, d.col)
        if sig[2]:
            raise InvalidDirectiveParam(f"@{d.name} cannot target channel {target!r}", d.line, d.col)
        if kind == "array" and sig[1] == 0:
            raise InvalidDirectiveParam(f"@static_array target {target!r} is not an array", d.line, d.col)
        return A.DirectiveBinding(qname, d.name, params, line=d.line, col=d.col)
    if kind == "loop":
        if scope is None or target not in scope.labels:
            raise UnresolvedDirectiveTarget(f"@{d.name} target {target!r} is not a loop label", d.line, d.col)
        return A.DirectiveBinding(A.qualify(func, target), d.name, params, line=d.line, col=d.col)
    if target not in functions:
        raise UnresolvedDirectiveTarget(f"@{d.name} target {target!r} is not a function", d.line, d.col)
    return A.DirectiveBinding(target, d.name, params, line=d.line, col=d.col)


def _pick_entry(functions: dict) -> str:
    if "main" in functions:
        return "main"
    called = set()
    for fn in functions.values():
        for s in A.iter_stmts(fn.body):
            for e in A.stmt_exprs(s):
                for sub in A.iter_expr(e):
                    if isinstance(sub, A.Call) and sub.func in functions and sub.func != fn.name:
                        called.add(sub.func)
    roots = [n for n in functions if n not in called]
    if len(roots) != 1:
        raise MiniCSyntaxError(
            "cannot determine the entry function: define 'main' or leave exactly one uncalled function")
    return roots[0]


def bind(items: list) -> A.Program:
    functions: dict = {}
    globals_: dict = {}
    for it in items:
        if isinstance(it, A.Function):
            if it.name in functions or it.name in BUILTINS:
                raise DuplicateSymbol(f"function {it.name!r} defined twice", it.line, it.col)
            functions[it.name] = it
        elif isinstance(it, A.Decl):
            if it.name in globals_:
                raise DuplicateSymbol(f"global {it.name!r} declared twice", it.line, it.col)
            globals_[it.name] = (it.base, len(it.sizes), it.chan)
    if not functions:
        raise MiniCSyntaxError("program defines no function")
    scopes = {name: _FuncScope(fn) for name, fn in functions.items()}
    _check_names(items, scopes, globals_, functions)

    bindings = []
    for k, it in enumerate(items):
        if isinstance(it, A.Directive):
            nxt = next((x for x in items[k + 1:] if not isinstance(x, A.Directive)), None)
            func = nxt.name if isinstance(nxt, A.Function) else None
            bindings.append(_bind_directive(it, func, scopes, globals_, functions))
        elif isinstance(it, A.Function):
            for s in A.iter_stmts(it.body):
                if isinstance(s, A.Directive):
                    bindings.append(_bind_directive(s, it.name, scopes, globals_, functions))
    seen: dict = {}
    for b in bindings:
        key = (b.target, "type" if b.directive in ("width", "fixed") else b.directive)
        if key in seen:
            raise ConflictingDirective(
                f"more than one {key[1]} directive on {b.target!r}", b.line, b.col)
        seen[key] = b
    return A.Program(tuple(items), _pick_entry(functions), tuple(bindings))


def parse_program(source: str) -> A.Program:
    """Parse MiniC source text into a bound :class:`Program`."""
    return bind(_Parser(source).program())


def parse_file(path) -> A.Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())
