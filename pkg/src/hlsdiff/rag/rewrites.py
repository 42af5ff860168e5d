"""Mechanical program rewrites, one per compatibility rule. They back the
rule-applying mock client and mirror each rule's before/after example."""

from __future__ import annotations

from dataclasses import replace

from ..minic import ast as A
from ..minic.compat import recursive_components

STATIC_CAPACITY = 64
STACK_DEPTH = 64
HEADER_REPLACEMENTS = {"vector": "hls_vector", "stream": "hls_stream", "cmath": "hls_math", "math": "hls_math"}


def _map_block(b: A.Block, f) -> A.Block:
    out = []
    for s in b.stmts:
        if isinstance(s, A.If):
            s = replace(s, then=_map_block(s.then, f), orelse=None if s.orelse is None else _map_block(s.orelse, f))
        elif isinstance(s, (A.For, A.While)):
            s = replace(s, body=_map_block(s.body, f))
        out.extend(f(s))
    return A.Block(tuple(out))


def _map_expr(e, f):
    if isinstance(e, A.Index):
        e = replace(e, indices=tuple(_map_expr(i, f) for i in e.indices))
    elif isinstance(e, A.Unary):
        e = replace(e, operand=_map_expr(e.operand, f))
    elif isinstance(e, A.Binary):
        e = replace(e, left=_map_expr(e.left, f), right=_map_expr(e.right, f))
    elif isinstance(e, A.Call):
        e = replace(e, args=tuple(_map_expr(a, f) for a in e.args))
    return f(e)


def _map_stmt_exprs(s, f):
    def ex(e):
        return None if e is None else _map_expr(e, f)
    if isinstance(s, A.Decl):
        return replace(s, sizes=tuple(ex(z) for z in s.sizes), init=ex(s.init))
    if isinstance(s, A.Assign):
        t = s.target
        if isinstance(t, A.Index):
            t = replace(t, indices=tuple(ex(i) for i in t.indices))
        return replace(s, target=t, value=ex(s.value))
    if isinstance(s, A.ExprStmt):
        return replace(s, expr=ex(s.expr))
    if isinstance(s, A.If):
        return replace(s, cond=ex(s.cond))
    if isinstance(s, A.For):
        return replace(s, init=None if s.init is None else _map_stmt_exprs(s.init, f), cond=ex(s.cond),
                       step=None if s.step is None else _map_stmt_exprs(s.step, f))
    if isinstance(s, A.While):
        return replace(s, cond=ex(s.cond))
    if isinstance(s, A.Return):
        return replace(s, value=ex(s.value))
    return s


def _functions(p: A.Program, f) -> A.Program:
    return replace(p, items=tuple(f(it) if isinstance(it, A.Function) else it for it in p.items))


def _has_directive(p: A.Program, target: str, name: str) -> bool:
    return any(b.target == target and b.directive == name for b in p.directives)


def _prepend(fn: A.Function, stmts) -> A.Function:
    return replace(fn, body=A.Block(tuple(stmts) + fn.body.stmts))


def _is_call(e, *names) -> bool:
    return isinstance(e, A.Call) and e.func in names


def _drop_calls(p: A.Program, names: tuple) -> A.Program:
    """Remove call statements to ``names``; other uses become 0."""
    def stmt(s):
        if isinstance(s, A.ExprStmt) and _is_call(s.expr, *names):
            return []
        return [_map_stmt_exprs(s, lambda e: A.Num(0) if _is_call(e, *names) else e)]
    return _functions(p, lambda fn: replace(fn, body=_map_block(fn.body, stmt)))


def fix_dynamic_alloc(p: A.Program) -> A.Program:
    def fn_fix(fn):
        def stmt(s):
            if isinstance(s, A.Decl) and _is_call(s.init, "alloc"):
                args = s.init.args
                sizes = tuple(args[k] if k < len(args) else A.Num(STATIC_CAPACITY) for k in range(len(s.sizes)))
                out = []
                if not _has_directive(p, A.qualify(fn.name, s.name), "static_array"):
                    out.append(A.Directive("static_array", (s.name, STATIC_CAPACITY)))
                return out + [replace(s, sizes=sizes, init=None)]
            return [s]
        return replace(fn, body=_map_block(fn.body, stmt))
    return _functions(p, fn_fix)


def fix_dynamic_free(p: A.Program) -> A.Program:
    return _drop_calls(p, ("free",))


def fix_dynamic_resize(p: A.Program) -> A.Program:
    def fn_fix(fn):
        targets = []

        def stmt(s):
            if isinstance(s, A.ExprStmt) and _is_call(s.expr, "resize"):
                a = s.expr.args[0]
                if isinstance(a, A.Name):
                    targets.append(a.name)
                return []
            return [s]
        body = _map_block(fn.body, stmt)
        fn = replace(fn, body=body)
        extra = []
        for t in dict.fromkeys(targets):
            if not _has_directive(p, A.qualify(fn.name, t), "static_array") and t in _array_names(fn):
                extra.append(A.Directive("static_array", (t, STATIC_CAPACITY)))
        return _prepend(fn, extra)
    return _functions(p, fn_fix)


def _array_names(fn: A.Function) -> set:
    names = {prm.name for prm in fn.params if prm.dims}
    names |= {s.name for s in A.iter_stmts(fn.body) if isinstance(s, A.Decl) and s.sizes}
    return names


def fix_console_io(p: A.Program) -> A.Program:
    return _drop_calls(p, ("print", "scan"))


def fix_nondeterministic(p: A.Program) -> A.Program:
    return _drop_calls(p, ("rand", "time"))


def fix_system_call(p: A.Program) -> A.Program:
    def fn_fix(fn):
        def stmt(s):
            if isinstance(s, A.ExprStmt) and _is_call(s.expr, "exit"):
                return [A.Return(s.expr.args[0] if fn.ret else None)]
            return [_map_stmt_exprs(s, lambda e: A.Num(0) if _is_call(e, "exit") else e)]
        return replace(fn, body=_map_block(fn.body, stmt))
    return _functions(p, fn_fix)


def fix_unbounded_recursion(p: A.Program) -> A.Program:
    limited = {b.target for b in p.directives if b.directive == "stack_limit"}
    heads = {comp[0] for comp in recursive_components(p) if not any(f in limited for f in comp)}
    return _functions(p, lambda fn: _prepend(fn, [A.Directive("stack_limit", (fn.name, STACK_DEPTH))])
                      if fn.name in heads else fn)


def fix_unsized_array(p: A.Program) -> A.Program:
    def fn_fix(fn):
        extra = [A.Directive("static_array", (prm.name, STATIC_CAPACITY)) for prm in fn.params
                 if prm.dims and None in prm.dims
                 and not _has_directive(p, A.qualify(fn.name, prm.name), "static_array")]
        return _prepend(fn, extra)
    return _functions(p, fn_fix)


def _const(e) -> bool:
    if isinstance(e, A.Num):
        return True
    if isinstance(e, A.Unary):
        return _const(e.operand)
    if isinstance(e, A.Binary):
        return _const(e.left) and _const(e.right)
    return False


def fix_variable_length_array(p: A.Program) -> A.Program:
    def fn_fix(fn):
        def stmt(s):
            if (isinstance(s, A.Decl) and s.sizes and not _is_call(s.init, "alloc")
                    and not all(z is not None and _const(z) for z in s.sizes)
                    and not _has_directive(p, A.qualify(fn.name, s.name), "static_array")):
                sizes = tuple(A.Num(STATIC_CAPACITY) if z is None else z for z in s.sizes)
                return [A.Directive("static_array", (s.name, STATIC_CAPACITY)), replace(s, sizes=sizes)]
            return [s]
        return replace(fn, body=_map_block(fn.body, stmt))
    p = _functions(p, fn_fix)
    # global arrays: fix the size to the static capacity
    items = []
    for it in p.items:
        if isinstance(it, A.Decl) and it.sizes and not all(z is not None and _const(z) for z in it.sizes) \
                and not _has_directive(p, it.name, "static_array"):
            it = replace(it, sizes=tuple(A.Num(STATIC_CAPACITY) for _ in it.sizes))
        items.append(it)
    return replace(p, items=tuple(items))


def fix_unsupported_header(p: A.Program) -> A.Program:
    from ..minic.builtins import HW_IMPORTS
    items = []
    have = {it.name for it in p.items if isinstance(it, A.Import)}
    for it in p.items:
        if isinstance(it, A.Import) and it.name not in HW_IMPORTS:
            new = HEADER_REPLACEMENTS.get(it.name)
            if new and new not in have:
                items.append(A.Import(new))
                have.add(new)
            continue
        items.append(it)
    return replace(p, items=tuple(items))


REWRITES = {
    "E_DYNAMIC_ALLOC": fix_dynamic_alloc,
    "E_DYNAMIC_FREE": fix_dynamic_free,
    "E_DYNAMIC_RESIZE": fix_dynamic_resize,
    "E_CONSOLE_IO": fix_console_io,
    "E_NONDETERMINISTIC_BUILTIN": fix_nondeterministic,
    "E_SYSTEM_CALL": fix_system_call,
    "E_UNBOUNDED_RECURSION": fix_unbounded_recursion,
    "E_UNSIZED_ARRAY": fix_unsized_array,
    "E_VARIABLE_LENGTH_ARRAY": fix_variable_length_array,
    "E_UNSUPPORTED_HEADER": fix_unsupported_header,
}
