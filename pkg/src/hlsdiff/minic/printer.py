from __future__ import annotations

from . import ast as A

_PREC = {
    "||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7


def format_num(v) -> str:
    if isinstance(v, float):
        r = repr(v)
        return r if ("." in r or "e" in r) else r + ".0"
    return str(v)


def format_expr(e, parent: int = 0) -> str:
    if isinstance(e, A.Num):
        s = format_num(e.value)
        return f"({s})" if e.value < 0 else s
    if isinstance(e, A.Name):
        return e.name
    if isinstance(e, A.Index):
        s = e.name + "".join(f"[{format_expr(i)}]" for i in e.indices)
        return ("probe " + s) if e.probe else s
    if isinstance(e, A.Call):
        s = f"{e.func}({', '.join(format_expr(a) for a in e.args)})"
        return ("probe " + s) if e.probe else s
    if isinstance(e, A.Unary):
        inner = format_expr(e.operand, _UNARY_PREC)
        if inner[0] in "-!":
            inner = f"({inner})"
        s = e.op + inner
        return f"({s})" if parent > _UNARY_PREC else s
    if isinstance(e, A.Binary):
        p = _PREC[e.op]
        s = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({s})" if p < parent else s
    raise TypeError(f"not an expression: {e!r}")


def format_directive(d: A.Directive) -> str:
    return f"@{d.name}({', '.join(str(a) for a in d.args)})"


def _decl(d: A.Decl) -> str:
    head = ("probe " if d.probe else "")
    head += f"chan<{d.base}>" if d.chan else d.base
    s = f"{head} {d.name}" + "".join(f"[{'' if z is None else format_expr(z)}]" for z in d.sizes)
    if d.init is not None:
        s += f" = {format_expr(d.init)}"
    return s


def _simple(s) -> str:
    if isinstance(s, A.Decl):
        return _decl(s)
    if isinstance(s, A.Assign):
        return ("probe " if s.probe else "") + f"{format_expr(s.target)} = {format_expr(s.value)}"
    if isinstance(s, A.ExprStmt):
        return format_expr(s.expr)
    raise TypeError(f"not a simple statement: {s!r}")


def _block(b: A.Block, depth: int, out: list):
    for s in b.stmts:
        _stmt(s, depth, out)


def _stmt(s, depth: int, out: list):
    pad = "    " * depth
    if isinstance(s, A.Directive):
        out.append(pad + format_directive(s))
    elif isinstance(s, (A.Decl, A.Assign, A.ExprStmt)):
        out.append(pad + _simple(s) + ";")
    elif isinstance(s, A.If):
        out.append(pad + f"if ({format_expr(s.cond)}) {{")
        _block(s.then, depth + 1, out)
        if s.orelse is not None:
            out.append(pad + "} else {")
            _block(s.orelse, depth + 1, out)
        out.append(pad + "}")
    elif isinstance(s, (A.For, A.While)):
        head = ("probe " if s.probe else "") + (f"{s.label}: " if s.label else "")
        if isinstance(s, A.For):
            init = _simple(s.init) if s.init is not None else ""
            cond = format_expr(s.cond) if s.cond is not None else ""
            step = _simple(s.step) if s.step is not None else ""
            out.append(pad + head + f"for ({init}; {cond}; {step}) {{")
        else:
            out.append(pad + head + f"while ({format_expr(s.cond)}) {{")
        _block(s.body, depth + 1, out)
        out.append(pad + "}")
    elif isinstance(s, A.Return):
        out.append(pad + ("return;" if s.value is None else f"return {format_expr(s.value)};"))
    elif isinstance(s, A.Break):
        out.append(pad + "break;")
    elif isinstance(s, A.Continue):
        out.append(pad + "continue;")
    else:
        raise TypeError(f"unknown statement {s!r}")


def _param(p: A.Param) -> str:
    pre = "probe " if p.probe else ""
    if p.chan:
        return f"{pre}{p.name}: chan<{p.base}>"
    dims = "".join(f"[{'' if d is None else d}]" for d in p.dims)
    return f"{pre}{p.name}: {p.base}{dims}"


def format_program(p: A.Program) -> str:
    """Render a program as MiniC source that parses back to an equal AST."""
    out: list = []
    for it in p.items:
        if isinstance(it, A.Directive):
            out.append(format_directive(it))
        elif isinstance(it, A.Import):
            out.append(f"import {it.name};")
        elif isinstance(it, A.Decl):
            out.append(_decl(it) + ";")
        elif isinstance(it, A.Function):
            ret = f": {it.ret}" if it.ret else ""
            out.append(f"fn {it.name}({', '.join(_param(x) for x in it.params)}){ret} {{")
            _block(it.body, 1, out)
            out.append("}")
            out.append("")
    return "\n".join(out).rstrip() + "\n"
