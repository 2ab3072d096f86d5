"""The seven semantic-preserving transformations.

Each operation takes a method tree and one candidate site and returns a
TransformedVariant whose printed source reparses to its tree. `apply`
drives single-place mode (one variant per site) and all-place mode (one
variant rewriting every site; renaming, boolean exchange, loop exchange,
and switch conversion only).

All-place rewrites run in document order. Because rewriting rebuilds
only the spine above a site and shares every other subtree, later site
nodes survive by identity and are re-located in the updated tree before
each application.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .analysis import (
    ALL_PLACE_KINDS,
    CandidateSite,
    ScopeInfo,
    TransformKind,
    derive_seed,
    enumerate_candidates,
    resolve_scopes,
)
from .nodes import (
    Assign,
    Binary,
    Block,
    BoolLit,
    Break,
    Call,
    Expr,
    ExprStmt,
    For,
    Ident,
    If,
    IntLit,
    LongLit,
    MethodAst,
    Param,
    Path,
    Stmt,
    StringLit,
    Switch,
    TryCatch,
    Unary,
    VarDecl,
    While,
    find_by_identity,
    fresh_name,
    get_at,
    replace_at,
)
from .printer import print_method

MODE_SINGLE = "single"
MODE_ALL = "all"


class ModeUnsupported(Exception):
    def __init__(self, kind: TransformKind):
        super().__init__(f"all-place mode is not applicable to {kind.value}")
        self.kind = kind


class TransformError(Exception):
    """The site does not address what the transformation expects."""


@dataclass(frozen=True)
class TransformedVariant:
    original_id: str
    kind: TransformKind
    sites: tuple[CandidateSite, ...]
    mode: str
    ast: MethodAst
    source: str


def _variant(original_id, kind, sites, mode, ast) -> TransformedVariant:
    return TransformedVariant(original_id, kind, tuple(sites), mode, ast, print_method(ast))


# ── VN: variable renaming ────────────────────────────────────────


def variable_renaming(
    ast: MethodAst, site: CandidateSite, scopes: ScopeInfo | None = None
) -> TransformedVariant:
    """Rename every declaration of the site's variable name, and every
    occurrence resolving to one, to a fresh `varN` (method-wide fresh)."""
    old_name = site.payload
    if scopes is None:
        scopes = resolve_scopes(ast)
    decl_indices = [i for i, d in enumerate(scopes.decls) if d.name == old_name]
    if not decl_indices:
        raise TransformError(f"no declaration named {old_name!r}")
    new_name = fresh_name("var", scopes.all_names)

    result: MethodAst = ast
    for idx in decl_indices:
        for occ in scopes.occurrences[idx]:
            result = replace_at(result, occ, Ident(new_name))
    for idx in decl_indices:
        decl = scopes.decls[idx]
        node = get_at(result, decl.path)
        if isinstance(node, VarDecl):
            result = replace_at(result, decl.path, replace(node, name=new_name))
        elif isinstance(node, Param):
            result = replace_at(result, decl.path, replace(node, name=new_name))
        elif isinstance(node, TryCatch):
            result = replace_at(result, decl.path, replace(node, exc_name=new_name))
        else:
            raise TransformError(f"unexpected declaring node {type(node).__name__}")
    return _variant(ast.name, TransformKind.VN, (site,), MODE_SINGLE, result)


# ── BX: boolean exchange ─────────────────────────────────────────


def boolean_exchange(
    ast: MethodAst, site: CandidateSite, scopes: ScopeInfo | None = None
) -> TransformedVariant:
    """Flip the variable's literal initializer and assignments; negate its
    plain reads and un-negate its negated reads."""
    if scopes is None:
        scopes = resolve_scopes(ast)
    decl_idx = next(
        (i for i, d in enumerate(scopes.decls) if d.path == site.path), None
    )
    if decl_idx is None:
        raise TransformError("site does not address a declaration")
    decl_node = get_at(ast, site.path)
    if not isinstance(decl_node, VarDecl) or not isinstance(decl_node.init, BoolLit):
        raise TransformError("boolean exchange needs a boolean-literal declaration")

    result = replace_at(
        ast, site.path + (("init", None),), BoolLit(not decl_node.init.value)
    )
    for occ in scopes.occurrences[decl_idx]:
        parent = get_at(result, occ[:-1])
        if isinstance(parent, Assign) and occ[-1] == ("target", None):
            value = parent.value
            if not isinstance(value, BoolLit):
                raise TransformError("assignment value is not a boolean literal")
            result = replace_at(result, occ[:-1] + (("value", None),), BoolLit(not value.value))
        elif isinstance(parent, Unary) and parent.op == "!" and not parent.postfix:
            result = replace_at(result, occ[:-1], get_at(result, occ))
        else:
            result = replace_at(result, occ, Unary("!", get_at(result, occ)))
    return _variant(ast.name, TransformKind.BX, (site,), MODE_SINGLE, result)


# ── LX: loop exchange ────────────────────────────────────────────


def loop_exchange(ast: MethodAst, site: CandidateSite) -> TransformedVariant:
    """for -> { init; while (cond) { body; update } }, while -> for (;cond;)."""
    node = get_at(ast, site.path)
    if isinstance(node, For):
        cond = node.cond if node.cond is not None else BoolLit(True)
        body_stmts = node.body.stmts
        if node.update is not None:
            body_stmts = body_stmts + (ExprStmt(node.update),)
        loop = While(cond, Block(body_stmts))
        wrapper = Block((node.init, loop) if node.init is not None else (loop,))
        result = replace_at(ast, site.path, wrapper)
    elif isinstance(node, While):
        result = replace_at(ast, site.path, For(None, node.cond, None, node.body))
    else:
        raise TransformError("site does not address a loop")
    return _variant(ast.name, TransformKind.LX, (site,), MODE_SINGLE, result)


# ── SF: switch to if ─────────────────────────────────────────────


def switch_to_if(ast: MethodAst, site: CandidateSite) -> TransformedVariant:
    """Hoist the selector into a fresh temporary, then build an else-if
    chain; case labels compare with == (ints) or .equals (strings)."""
    node = get_at(ast, site.path)
    if not isinstance(node, Switch):
        raise TransformError("site does not address a switch")
    sel_name = fresh_name("sel", resolve_scopes(ast).all_names)
    sel_type = "int"
    for case in node.cases:
        for label in case.labels:
            if isinstance(label, StringLit):
                sel_type = "String"
            elif isinstance(label, LongLit) and sel_type == "int":
                sel_type = "long"
    decl = VarDecl(sel_type, sel_name, node.selector)

    def label_test(label: Expr) -> Expr:
        if isinstance(label, StringLit):
            return Call(Ident(sel_name), "equals", (label,))
        return Binary("==", Ident(sel_name), label)

    chain: Stmt | None = None
    if node.default_body is not None:
        chain = Block(_strip_trailing_break(node.default_body))
    for case in reversed(node.cases):
        test = label_test(case.labels[0])
        for label in case.labels[1:]:
            test = Binary("||", test, label_test(label))
        chain = If(test, Block(_strip_trailing_break(case.body)), chain)
    stmts: tuple[Stmt, ...] = (decl,) if chain is None else (decl, chain)
    result = replace_at(ast, site.path, Block(stmts))
    return _variant(ast.name, TransformKind.SF, (site,), MODE_SINGLE, result)


def _strip_trailing_break(stmts: tuple[Stmt, ...]) -> tuple[Stmt, ...]:
    if stmts and isinstance(stmts[-1], Break):
        return stmts[:-1]
    return stmts


# ── PS: permute statement ────────────────────────────────────────


def permute_statement(ast: MethodAst, site: CandidateSite) -> TransformedVariant:
    block = get_at(ast, site.path)
    i, j = site.payload
    if not isinstance(block, Block) or j != i + 1 or j >= len(block.stmts):
        raise TransformError("site does not address an adjacent pair in a block")
    stmts = list(block.stmts)
    stmts[i], stmts[j] = stmts[j], stmts[i]
    result = replace_at(ast, site.path, Block(tuple(stmts)))
    return _variant(ast.name, TransformKind.PS, (site,), MODE_SINGLE, result)


# ── TC: try-catch insertion ──────────────────────────────────────


def try_catch_insertion(ast: MethodAst, site: CandidateSite) -> TransformedVariant:
    block = get_at(ast, site.path)
    idx = site.payload
    if not isinstance(block, Block) or not 0 <= idx < len(block.stmts):
        raise TransformError("site does not address a statement in a block")
    exc = fresh_name("ex", resolve_scopes(ast).all_names)
    wrapped = TryCatch(
        Block((block.stmts[idx],)),
        "Exception",
        exc,
        Block((ExprStmt(Call(Ident(exc), "printStackTrace", ())),)),
    )
    stmts = block.stmts[:idx] + (wrapped,) + block.stmts[idx + 1 :]
    result = replace_at(ast, site.path, Block(stmts))
    return _variant(ast.name, TransformKind.TC, (site,), MODE_SINGLE, result)


# ── UN: unused statement insertion ───────────────────────────────


def unused_statement_insertion(ast: MethodAst, site: CandidateSite) -> TransformedVariant:
    block = get_at(ast, site.path)
    idx = site.payload
    if not isinstance(block, Block) or not 0 <= idx <= len(block.stmts):
        raise TransformError("site does not address an insertion point")
    name = fresh_name("unused", resolve_scopes(ast).all_names)
    decl = VarDecl("String", name, StringLit("metamorph"))
    stmts = block.stmts[:idx] + (decl,) + block.stmts[idx:]
    result = replace_at(ast, site.path, Block(stmts))
    return _variant(ast.name, TransformKind.UN, (site,), MODE_SINGLE, result)


_SINGLE_APPLIERS = {
    TransformKind.VN: variable_renaming,
    TransformKind.BX: boolean_exchange,
    TransformKind.LX: loop_exchange,
    TransformKind.SF: switch_to_if,
    TransformKind.PS: permute_statement,
    TransformKind.TC: try_catch_insertion,
    TransformKind.UN: unused_statement_insertion,
}


def apply_at(ast: MethodAst, site: CandidateSite) -> TransformedVariant:
    return _SINGLE_APPLIERS[site.kind](ast, site)


def apply(
    ast: MethodAst,
    kind: TransformKind,
    mode: str = MODE_SINGLE,
    seed: int = 0,
    original_id: str | None = None,
    relaxed_calls: bool = False,
) -> list[TransformedVariant]:
    """All variants of `kind` for one method.

    Single-place: one variant per enumerated site. All-place: a single
    variant rewriting every site in document order; rejected for PS, TC,
    and UN, whose sites are pairs or seeded-random positions.
    """
    if mode not in (MODE_SINGLE, MODE_ALL):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == MODE_ALL and kind not in ALL_PLACE_KINDS:
        raise ModeUnsupported(kind)
    method_id = original_id if original_id is not None else ast.name
    sites = enumerate_candidates(ast, kind, rng_seed=seed, relaxed_calls=relaxed_calls)
    if not sites:
        return []
    if mode == MODE_SINGLE:
        out = []
        for site in sites:
            variant = apply_at(ast, site)
            out.append(replace(variant, original_id=method_id))
        return out
    return [_apply_all_place(ast, kind, sites, method_id)]


def _apply_all_place(
    ast: MethodAst,
    kind: TransformKind,
    sites: list[CandidateSite],
    method_id: str,
) -> TransformedVariant:
    current = ast
    if kind == TransformKind.VN:
        # Sites are names; renaming never invalidates the remaining names.
        for site in sites:
            current = variable_renaming(current, site).ast
    else:
        targets = [get_at(ast, site.path) for site in sites]
        for site, target in zip(sites, targets):
            path = find_by_identity(current, target)
            if path is None:
                raise TransformError("site node vanished during all-place rewriting")
            current = apply_at(current, replace(site, path=path)).ast
    return _variant(method_id, kind, sites, MODE_ALL, current)
