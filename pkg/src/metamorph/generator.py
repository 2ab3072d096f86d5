"""Seeded random generator of interpretable MethodLang methods.

Used as the desk-scale corpus source for property tests and pipeline
runs. Construct coverage is enforced by index, not by chance: within
every window of 20 methods, 4 contain a for loop, 4 a while loop, 3 a
switch convertible to an if chain, and 4 an exchange-eligible boolean
local; every method has at least two statements. All generated methods
are interpretable and terminate well inside the default step budget.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .analysis import derive_seed
from .nodes import (
    Assert,
    Assign,
    Binary,
    Block,
    BoolLit,
    Break,
    Continue,
    Expr,
    ExprStmt,
    If,
    IntLit,
    MethodAst,
    Param,
    Return,
    Stmt,
    StringLit,
    Switch,
    SwitchCase,
    Ternary,
    Unary,
    VarDecl,
    While,
    For,
    Ident,
    statement_count,
)

_VERBS = ("get", "compute", "update", "merge", "scan", "apply", "build", "count", "find", "reduce")
_NOUNS = ("total", "value", "index", "weight", "offset", "limit", "score", "span", "depth", "rank")
_PARAM_WORDS = ("base", "item", "seed", "left", "right", "input", "bound", "shift")
_STRING_WORDS = ("alpha", "beta", "gamma", "delta", "omega")

DEFAULT_MAX_STMTS = 64


@dataclass
class _Ctx:
    rng: random.Random
    used: set[str]
    int_vars: list[str]
    bool_vars: list[str]
    str_vars: list[str]

    def fresh(self, base: str) -> str:
        name = base
        n = 2
        while name in self.used:
            name = f"{base}{n}"
            n += 1
        self.used.add(name)
        return name


def gen_corpus(count: int, seed: int, max_stmts: int = DEFAULT_MAX_STMTS) -> list[MethodAst]:
    """Deterministic corpus of `count` interpretable methods."""
    if count < 1:
        raise ValueError("count must be >= 1")
    methods = []
    for i in range(count):
        window = i % 20
        method = gen_method(
            derive_seed(seed, "method", i),
            force_for=window in (0, 1, 2, 3),
            force_while=window in (4, 5, 6, 7),
            force_switch=window in (8, 9, 10),
            force_bool=window in (11, 12, 13, 14),
            max_stmts=max_stmts,
        )
        methods.append(method)
    return methods


def corpus_coverage(methods: list[MethodAst]) -> dict[str, float]:
    """Fractions of methods containing each quota construct."""
    from .analysis import TransformKind, enumerate_candidates
    from .nodes import walk

    n = len(methods)
    has_for = sum(1 for m in methods if any(isinstance(x, For) for _, x in walk(m)))
    has_while = sum(1 for m in methods if any(isinstance(x, While) for _, x in walk(m)))
    has_sf = sum(1 for m in methods if enumerate_candidates(m, TransformKind.SF))
    has_bx = sum(1 for m in methods if enumerate_candidates(m, TransformKind.BX))
    min_two = sum(1 for m in methods if statement_count(m) >= 2)
    return {
        "for": has_for / n,
        "while": has_while / n,
        "switch_convertible": has_sf / n,
        "bool_exchangeable": has_bx / n,
        "at_least_two_stmts": min_two / n,
    }


def gen_method(
    seed: int,
    force_for: bool = False,
    force_while: bool = False,
    force_switch: bool = False,
    force_bool: bool = False,
    max_stmts: int = DEFAULT_MAX_STMTS,
) -> MethodAst:
    rng = random.Random(seed)
    ctx = _Ctx(rng=rng, used=set(), int_vars=[], bool_vars=[], str_vars=[])

    name = rng.choice(_VERBS) + rng.choice(_NOUNS).capitalize()
    if rng.random() < 0.3:
        name += rng.choice(_NOUNS).capitalize()
    ctx.used.add(name)

    params = [Param("int", ctx.fresh(rng.choice(_PARAM_WORDS) + rng.choice(_NOUNS).capitalize()))]
    ctx.int_vars.append(params[0].name)
    for _ in range(rng.randrange(3)):
        ptype = rng.choice(("int", "int", "boolean", "String"))
        pname = ctx.fresh(rng.choice(_PARAM_WORDS) + rng.choice(_NOUNS).capitalize())
        params.append(Param(ptype, pname))
        {"int": ctx.int_vars, "boolean": ctx.bool_vars, "String": ctx.str_vars}[ptype].append(pname)

    return_type = rng.choice(("int", "int", "int", "boolean", "String", "void"))

    stmts: list[Stmt] = []
    acc = ctx.fresh("acc")
    stmts.append(VarDecl("int", acc, _int_expr(ctx, 1)))
    ctx.int_vars.append(acc)

    if return_type == "String" or rng.random() < 0.25:
        sname = ctx.fresh("text")
        stmts.append(VarDecl("String", sname, StringLit(rng.choice(_STRING_WORDS))))
        ctx.str_vars.append(sname)

    builders = []
    if force_for:
        builders.append(_for_feature)
    if force_while:
        builders.append(_while_feature)
    if force_switch:
        builders.append(_switch_feature)
    if force_bool:
        builders.append(_bool_feature)
    for optional in (_for_feature, _switch_feature, _bool_feature, _if_feature):
        if rng.random() < 0.2:
            builders.append(optional)
    if not builders:
        builders.append(_if_feature)
    rng.shuffle(builders)

    for build in builders:
        stmts.extend(build(ctx, acc))
        if rng.random() < 0.6:
            stmts.append(_filler(ctx, acc))

    # Guaranteed plain assignment: a control-free non-declaration statement.
    stmts.append(ExprStmt(Assign(Ident(acc), "=", _int_expr(ctx, 2))))
    if rng.random() < 0.3:
        stmts.append(Assert(Binary("==", Ident(acc), Ident(acc))))

    stmts.append(_return_stmt(ctx, return_type, acc))
    method = MethodAst(name, tuple(params), return_type, Block(tuple(stmts)))
    assert statement_count(method) >= 2
    assert statement_count(method) <= max_stmts, "generator exceeded the statement cap"
    return method


# ── feature builders ─────────────────────────────────────────────


def _for_feature(ctx: _Ctx, acc: str) -> list[Stmt]:
    rng = ctx.rng
    i = ctx.fresh("i")
    bound = IntLit(rng.randrange(2, 6))
    body: list[Stmt] = []
    if rng.random() < 0.15:
        # A continue makes this loop ineligible for exchange; keep some around.
        body.append(
            If(
                Binary("==", Binary("%", Ident(i), IntLit(2)), IntLit(1)),
                Block((Continue(),)),
            )
        )
    body.append(_acc_update(ctx, acc, extra=Ident(i)))
    if rng.random() < 0.4:
        body.append(
            If(
                Binary(">", Ident(acc), IntLit(rng.randrange(50, 90))),
                Block((ExprStmt(Assign(Ident(acc), "=", Binary("-", Ident(acc), IntLit(7)))),)),
            )
        )
    return [
        For(
            VarDecl("int", i, IntLit(0)),
            Binary("<", Ident(i), bound),
            Unary("++", Ident(i), postfix=True),
            Block(tuple(body)),
        )
    ]


def _while_feature(ctx: _Ctx, acc: str) -> list[Stmt]:
    rng = ctx.rng
    c = ctx.fresh("step")
    bound = IntLit(rng.randrange(2, 6))
    body = [
        _acc_update(ctx, acc, extra=Ident(c)),
        ExprStmt(Assign(Ident(c), "=", Binary("+", Ident(c), IntLit(1)))),
    ]
    return [
        VarDecl("int", c, IntLit(0)),
        While(Binary("<", Ident(c), bound), Block(tuple(body))),
    ]


def _switch_feature(ctx: _Ctx, acc: str) -> list[Stmt]:
    rng = ctx.rng
    modulus = rng.randrange(2, 4)
    selector = Binary("%", _int_operand(ctx), IntLit(modulus))
    cases = []
    for label in range(modulus):
        body: list[Stmt] = [_acc_update(ctx, acc)]
        if rng.random() < 0.3:
            body.append(ExprStmt(Assign(Ident(acc), "=", Binary("*", Ident(acc), IntLit(2)))))
        body.append(Break())
        cases.append(SwitchCase((IntLit(label),), tuple(body)))
    default_body = None
    if rng.random() < 0.8:
        default_stmts: list[Stmt] = [_acc_update(ctx, acc)]
        if rng.random() < 0.5:
            default_stmts.append(Break())
        default_body = tuple(default_stmts)
    return [Switch(selector, tuple(cases), default_body)]


def _bool_feature(ctx: _Ctx, acc: str) -> list[Stmt]:
    rng = ctx.rng
    flag = ctx.fresh("flag")
    out: list[Stmt] = [VarDecl("boolean", flag, BoolLit(rng.random() < 0.5))]
    if rng.random() < 0.5:
        g = ctx.fresh("round")
        out[0] = VarDecl("boolean", flag, BoolLit(False))
        out.extend(
            [
                VarDecl("int", g, IntLit(0)),
                While(
                    Unary("!", Ident(flag)),
                    Block(
                        (
                            ExprStmt(Assign(Ident(g), "=", Binary("+", Ident(g), IntLit(1)))),
                            If(
                                Binary(">", Ident(g), IntLit(rng.randrange(2, 5))),
                                Block((ExprStmt(Assign(Ident(flag), "=", BoolLit(True))),)),
                            ),
                        )
                    ),
                ),
                ExprStmt(Assign(Ident(acc), "=", Binary("+", Ident(acc), Ident(g)))),
            ]
        )
        ctx.int_vars.append(g)
    else:
        out.append(
            If(
                _bool_cond(ctx),
                Block((ExprStmt(Assign(Ident(flag), "=", BoolLit(True))),)),
                Block((ExprStmt(Assign(Ident(flag), "=", BoolLit(False))),)),
            )
        )
        out.append(
            If(
                Unary("!", Ident(flag)) if rng.random() < 0.5 else Ident(flag),
                Block((_acc_update(ctx, acc),)),
                Block((ExprStmt(Assign(Ident(acc), "=", Binary("-", Ident(acc), IntLit(3)))),)),
            )
        )
    ctx.bool_vars.append(flag)
    return out


def _if_feature(ctx: _Ctx, acc: str) -> list[Stmt]:
    rng = ctx.rng
    then = Block((_acc_update(ctx, acc),))
    if rng.random() < 0.5:
        return [If(_bool_cond(ctx), then)]
    els = Block((ExprStmt(Assign(Ident(acc), "=", _int_expr(ctx, 2))),))
    return [If(_bool_cond(ctx), then, els)]


def _filler(ctx: _Ctx, acc: str) -> Stmt:
    rng = ctx.rng
    roll = rng.random()
    if roll < 0.35:
        # Fresh independent declaration: fodder for statement permutation.
        t = ctx.fresh("tmp")
        stmt = VarDecl("int", t, IntLit(rng.randrange(10)))
        ctx.int_vars.append(t)
        return stmt
    if roll < 0.55 and ctx.str_vars:
        s = rng.choice(ctx.str_vars)
        return ExprStmt(
            Assign(Ident(s), "=", Binary("+", Ident(s), rng.choice((StringLit("-"), Ident(acc)))))
        )
    if roll < 0.75:
        return ExprStmt(
            Assign(
                Ident(acc),
                "=",
                Ternary(_bool_cond(ctx), _int_expr(ctx, 1), _int_expr(ctx, 1)),
            )
        )
    return _acc_update(ctx, acc)


def _acc_update(ctx: _Ctx, acc: str, extra: Expr | None = None) -> Stmt:
    rng = ctx.rng
    term = extra if extra is not None else _int_operand(ctx)
    op = rng.choice(("+", "+", "-", "*"))
    return ExprStmt(Assign(Ident(acc), "=", Binary(op, Ident(acc), term)))


def _return_stmt(ctx: _Ctx, return_type: str, acc: str) -> Stmt:
    rng = ctx.rng
    if return_type == "int":
        return Return(Ident(acc) if rng.random() < 0.6 else Binary("+", Ident(acc), _int_operand(ctx)))
    if return_type == "boolean":
        return Return(Binary("==", Binary("%", Ident(acc), IntLit(2)), IntLit(0)))
    if return_type == "String":
        return Return(Binary("+", Ident(ctx.str_vars[0]), Ident(acc)))
    return Return(None)


# ── expressions ──────────────────────────────────────────────────


def _int_operand(ctx: _Ctx) -> Expr:
    rng = ctx.rng
    if ctx.int_vars and rng.random() < 0.7:
        return Ident(rng.choice(ctx.int_vars))
    return IntLit(rng.randrange(1, 10))


def _int_expr(ctx: _Ctx, depth: int) -> Expr:
    rng = ctx.rng
    if depth <= 0 or rng.random() < 0.4:
        return _int_operand(ctx)
    roll = rng.random()
    if roll < 0.15:
        return Binary("/", _int_operand(ctx), IntLit(rng.randrange(2, 5)))
    if roll < 0.3:
        return Binary("%", _int_expr(ctx, depth - 1), IntLit(rng.randrange(2, 7)))
    if roll < 0.4:
        return Unary("-", _int_operand(ctx))
    op = rng.choice(("+", "-", "*"))
    return Binary(op, _int_expr(ctx, depth - 1), _int_expr(ctx, depth - 1))


def _bool_cond(ctx: _Ctx) -> Expr:
    rng = ctx.rng
    if ctx.bool_vars and rng.random() < 0.3:
        read: Expr = Ident(rng.choice(ctx.bool_vars))
        return Unary("!", read) if rng.random() < 0.5 else read
    cmp_op = rng.choice(("<", "<=", ">", ">=", "==", "!="))
    cond: Expr = Binary(cmp_op, _int_operand(ctx), _int_expr(ctx, 1))
    if rng.random() < 0.2:
        other = Binary(rng.choice(("<", ">")), _int_operand(ctx), IntLit(rng.randrange(5)))
        cond = Binary(rng.choice(("&&", "||")), cond, other)
    return cond
