"""Deterministic pretty-printer for MethodLang ASTs.

Output uses 4-space indentation and one statement per line. Parentheses
are emitted from operator precedence only, so printing is canonical:
`parse(print_method(a))` is structurally equal to `a`.
"""

from __future__ import annotations

from .nodes import (
    ArrayIndex,
    Assert,
    Assign,
    Binary,
    Block,
    BoolLit,
    Break,
    Call,
    Cast,
    Continue,
    DoubleLit,
    Expr,
    ExprStmt,
    FieldAccess,
    For,
    Ident,
    If,
    IntLit,
    LongLit,
    MethodAst,
    New,
    Return,
    Stmt,
    StringLit,
    Switch,
    Ternary,
    TryCatch,
    Unary,
    VarDecl,
    While,
)

_INDENT = "    "

# Precedence levels; higher binds tighter.
_ASSIGN, _TERNARY, _OR, _AND, _EQ, _REL, _ADD, _MUL, _UNARY, _POSTFIX, _PRIMARY = range(11)

_BINARY_PREC = {
    "||": _OR,
    "&&": _AND,
    "==": _EQ,
    "!=": _EQ,
    "<": _REL,
    ">": _REL,
    "<=": _REL,
    ">=": _REL,
    "+": _ADD,
    "-": _ADD,
    "*": _MUL,
    "/": _MUL,
    "%": _MUL,
}

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r", "\0": "\\0"}


def print_method(method: MethodAst) -> str:
    params = ", ".join(f"{p.type_name} {p.name}" for p in method.params)
    lines = [f"{method.return_type} {method.name}({params}) {{"]
    for stmt in method.body.stmts:
        _emit_stmt(stmt, 1, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_expr(expr: Expr) -> str:
    return _expr(expr, _ASSIGN)


# ── statements ───────────────────────────────────────────────────


def _emit_stmt(stmt: Stmt, depth: int, lines: list[str]) -> None:
    pad = _INDENT * depth
    if isinstance(stmt, VarDecl):
        init = f" = {_expr(stmt.init, _TERNARY)}" if stmt.init is not None else ""
        lines.append(f"{pad}{stmt.type_name} {stmt.name}{init};")
    elif isinstance(stmt, ExprStmt):
        lines.append(f"{pad}{_expr(stmt.expr, _ASSIGN)};")
    elif isinstance(stmt, Block):
        lines.append(f"{pad}{{")
        for inner in stmt.stmts:
            _emit_stmt(inner, depth + 1, lines)
        lines.append(f"{pad}}}")
    elif isinstance(stmt, If):
        _emit_if(stmt, depth, lines, pad)
    elif isinstance(stmt, While):
        lines.append(f"{pad}while ({_expr(stmt.cond, _ASSIGN)}) {{")
        for inner in stmt.body.stmts:
            _emit_stmt(inner, depth + 1, lines)
        lines.append(f"{pad}}}")
    elif isinstance(stmt, For):
        lines.append(f"{pad}{_for_header(stmt)} {{")
        for inner in stmt.body.stmts:
            _emit_stmt(inner, depth + 1, lines)
        lines.append(f"{pad}}}")
    elif isinstance(stmt, Switch):
        _emit_switch(stmt, depth, lines, pad)
    elif isinstance(stmt, Return):
        value = f" {_expr(stmt.value, _ASSIGN)}" if stmt.value is not None else ""
        lines.append(f"{pad}return{value};")
    elif isinstance(stmt, Break):
        lines.append(f"{pad}break;")
    elif isinstance(stmt, Continue):
        lines.append(f"{pad}continue;")
    elif isinstance(stmt, TryCatch):
        lines.append(f"{pad}try {{")
        for inner in stmt.body.stmts:
            _emit_stmt(inner, depth + 1, lines)
        lines.append(f"{pad}}} catch ({stmt.exc_type} {stmt.exc_name}) {{")
        for inner in stmt.handler.stmts:
            _emit_stmt(inner, depth + 1, lines)
        lines.append(f"{pad}}}")
    elif isinstance(stmt, Assert):
        lines.append(f"{pad}assert {_expr(stmt.expr, _ASSIGN)};")
    else:
        raise TypeError(f"unprintable statement: {stmt!r}")


def _emit_if(stmt: If, depth: int, lines: list[str], pad: str) -> None:
    lines.append(f"{pad}if ({_expr(stmt.cond, _ASSIGN)}) {{")
    for inner in stmt.then.stmts:
        _emit_stmt(inner, depth + 1, lines)
    els = stmt.els
    while isinstance(els, If):
        lines.append(f"{pad}}} else if ({_expr(els.cond, _ASSIGN)}) {{")
        for inner in els.then.stmts:
            _emit_stmt(inner, depth + 1, lines)
        els = els.els
    if els is not None:
        lines.append(f"{pad}}} else {{")
        for inner in els.stmts:  # normalized: a Block
            _emit_stmt(inner, depth + 1, lines)
    lines.append(f"{pad}}}")


def _for_header(stmt: For) -> str:
    if isinstance(stmt.init, VarDecl):
        init = f" = {_expr(stmt.init.init, _TERNARY)}" if stmt.init.init is not None else ""
        init_s = f"{stmt.init.type_name} {stmt.init.name}{init}"
    elif isinstance(stmt.init, ExprStmt):
        init_s = _expr(stmt.init.expr, _ASSIGN)
    else:
        init_s = ""
    cond_s = f" {_expr(stmt.cond, _ASSIGN)}" if stmt.cond is not None else ""
    upd_s = f" {_expr(stmt.update, _ASSIGN)}" if stmt.update is not None else ""
    return f"for ({init_s};{cond_s};{upd_s})"


def _emit_switch(stmt: Switch, depth: int, lines: list[str], pad: str) -> None:
    inner_pad = _INDENT * (depth + 1)
    lines.append(f"{pad}switch ({_expr(stmt.selector, _ASSIGN)}) {{")
    for case in stmt.cases:
        for label in case.labels:
            lines.append(f"{inner_pad}case {_expr(label, _TERNARY)}:")
        for inner in case.body:
            _emit_stmt(inner, depth + 2, lines)
    if stmt.default_body is not None:
        lines.append(f"{inner_pad}default:")
        for inner in stmt.default_body:
            _emit_stmt(inner, depth + 2, lines)
    lines.append(f"{pad}}}")


# ── expressions ──────────────────────────────────────────────────


def _expr(expr: Expr, min_prec: int) -> str:
    text, prec = _render(expr)
    if prec < min_prec:
        return f"({text})"
    return text


def _render(expr: Expr) -> tuple[str, int]:
    if isinstance(expr, IntLit):
        return str(expr.value), _PRIMARY
    if isinstance(expr, LongLit):
        return f"{expr.value}L", _PRIMARY
    if isinstance(expr, DoubleLit):
        return expr.text, _PRIMARY
    if isinstance(expr, BoolLit):
        return ("true" if expr.value else "false"), _PRIMARY
    if isinstance(expr, StringLit):
        return _quote(expr.value), _PRIMARY
    if isinstance(expr, Ident):
        return expr.name, _PRIMARY
    if isinstance(expr, FieldAccess):
        return f"{_expr(expr.receiver, _POSTFIX)}.{expr.name}", _POSTFIX
    if isinstance(expr, ArrayIndex):
        return f"{_expr(expr.array, _POSTFIX)}[{_expr(expr.index, _TERNARY)}]", _POSTFIX
    if isinstance(expr, Call):
        args = ", ".join(_expr(a, _TERNARY) for a in expr.args)
        if expr.receiver is None:
            return f"{expr.name}({args})", _POSTFIX
        return f"{_expr(expr.receiver, _POSTFIX)}.{expr.name}({args})", _POSTFIX
    if isinstance(expr, New):
        args = ", ".join(_expr(a, _TERNARY) for a in expr.args)
        return f"new {expr.type_name}({args})", _POSTFIX
    if isinstance(expr, Cast):
        return f"({expr.type_name}) {_expr(expr.operand, _UNARY)}", _UNARY
    if isinstance(expr, Unary):
        if expr.postfix:
            return f"{_expr(expr.operand, _POSTFIX)}{expr.op}", _POSTFIX
        operand = _expr(expr.operand, _UNARY)
        # "- -x" and "- --x" must not fuse into a decrement token.
        if expr.op == "-" and operand.startswith("-"):
            operand = f"({operand})"
        return f"{expr.op}{operand}", _UNARY
    if isinstance(expr, Binary):
        prec = _BINARY_PREC[expr.op]
        left = _expr(expr.left, prec)
        right = _expr(expr.right, prec + 1)  # left-associative
        return f"{left} {expr.op} {right}", prec
    if isinstance(expr, Ternary):
        cond = _expr(expr.cond, _OR)
        if_true = _expr(expr.if_true, _OR)
        if_false = _expr(expr.if_false, _TERNARY)
        return f"{cond} ? {if_true} : {if_false}", _TERNARY
    if isinstance(expr, Assign):
        target = _expr(expr.target, _POSTFIX)
        return f"{target} {expr.op} {_expr(expr.value, _TERNARY)}", _ASSIGN
    raise TypeError(f"unprintable expression: {expr!r}")


def _quote(value: str) -> str:
    out = ['"']
    for ch in value:
        if ch in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[ch])
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)
