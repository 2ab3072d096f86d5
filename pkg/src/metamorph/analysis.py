"""Scope resolution, read/write sets, and transformation-site enumeration.

Identifier occurrences are keyed by node path, so resolution data stays
valid while a tree is rewritten one site at a time. Name resolution is
sequential within a block: a local is visible only after its declaration,
matching the subject language's use-before-declaration rules.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional

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
    Expr,
    ExprStmt,
    FieldAccess,
    For,
    Ident,
    If,
    MethodAst,
    New,
    Path,
    Return,
    Stmt,
    Switch,
    Ternary,
    TryCatch,
    Unary,
    VarDecl,
    While,
    collect_names,
    get_at,
    walk,
)


class TransformKind(str, Enum):
    VN = "VN"  # variable renaming
    BX = "BX"  # boolean exchange
    LX = "LX"  # loop exchange
    SF = "SF"  # switch to if
    PS = "PS"  # permute statement
    TC = "TC"  # try-catch insertion
    UN = "UN"  # unused statement insertion

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


ALL_KINDS = tuple(TransformKind)
ALL_PLACE_KINDS = (TransformKind.VN, TransformKind.BX, TransformKind.LX, TransformKind.SF)


class DuplicateDeclaration(Exception):
    def __init__(self, name: str):
        super().__init__(f"duplicate declaration of {name!r} in one scope")
        self.name = name


@dataclass(frozen=True)
class Declaration:
    name: str
    kind: str  # "param" | "local" | "exc"
    path: Path  # Param, VarDecl, or TryCatch node
    order: int  # document order


@dataclass
class ScopeInfo:
    decls: list[Declaration]
    # Ident-node path -> index into decls, or None for external names.
    resolution: dict[Path, Optional[int]]
    # decl index -> Ident occurrence paths, document order.
    occurrences: dict[int, list[Path]]
    all_names: set[str]

    def decl_of(self, path: Path) -> Optional[Declaration]:
        idx = self.resolution.get(path)
        return None if idx is None else self.decls[idx]

    def declared_names(self) -> list[str]:
        """Distinct declared names in first-declaration order."""
        seen: list[str] = []
        for decl in self.decls:
            if decl.name not in seen:
                seen.append(decl.name)
        return seen


@dataclass(frozen=True)
class RwSet:
    reads: frozenset[str]
    writes: frozenset[str]
    calls: int
    control: bool  # contains return/break/continue


@dataclass(frozen=True)
class CandidateSite:
    """One applicable location for one transformation kind.

    `path` addresses the governing node (declaration, loop, switch, or
    block); `payload` carries the kind-specific extra: the variable name
    for VN/BX, the adjacent index pair for PS, the statement index for
    TC, and the insertion index for UN.
    """

    kind: TransformKind
    path: Path
    payload: object = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "path": [[f, i] for f, i in self.path],
            "payload": list(self.payload) if isinstance(self.payload, tuple) else self.payload,
        }

    @staticmethod
    def from_json(data: dict) -> "CandidateSite":
        payload = data["payload"]
        if isinstance(payload, list):
            payload = tuple(payload)
        path = tuple((f, i) for f, i in data["path"])
        return CandidateSite(TransformKind(data["kind"]), path, payload)


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from arbitrary key parts (splittable RNG)."""
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


# ── scope resolution ─────────────────────────────────────────────


def resolve_scopes(ast: MethodAst) -> ScopeInfo:
    """Map every identifier occurrence to its declaration.

    Raises DuplicateDeclaration when one scope declares a name twice;
    names with no declaration in the method resolve as external.
    """
    info = ScopeInfo(decls=[], resolution={}, occurrences={}, all_names=set())
    order = iter(range(1 << 30))

    scopes: list[dict[str, int]] = [{}]

    def declare(name: str, kind: str, path: Path) -> None:
        if name in scopes[-1]:
            raise DuplicateDeclaration(name)
        idx = len(info.decls)
        info.decls.append(Declaration(name, kind, path, next(order)))
        info.occurrences[idx] = []
        scopes[-1][name] = idx

    def lookup(name: str) -> Optional[int]:
        for scope in reversed(scopes):
            if name in scope:
                return scope[name]
        return None

    def resolve_expr(expr: Expr, path: Path) -> None:
        if isinstance(expr, Ident):
            idx = lookup(expr.name)
            info.resolution[path] = idx
            if idx is not None:
                info.occurrences[idx].append(path)
            return
        for step, child in _expr_children(expr):
            resolve_expr(child, path + (step,))

    def resolve_stmts(stmts, path: Path, fname: str) -> None:
        for i, stmt in enumerate(stmts):
            resolve_stmt(stmt, path + ((fname, i),))

    def resolve_stmt(stmt: Stmt, path: Path) -> None:
        if isinstance(stmt, VarDecl):
            if stmt.init is not None:
                resolve_expr(stmt.init, path + (("init", None),))
            declare(stmt.name, "local", path)
        elif isinstance(stmt, ExprStmt):
            resolve_expr(stmt.expr, path + (("expr", None),))
        elif isinstance(stmt, Block):
            scopes.append({})
            resolve_stmts(stmt.stmts, path, "stmts")
            scopes.pop()
        elif isinstance(stmt, If):
            resolve_expr(stmt.cond, path + (("cond", None),))
            resolve_stmt(stmt.then, path + (("then", None),))
            if stmt.els is not None:
                resolve_stmt(stmt.els, path + (("els", None),))
        elif isinstance(stmt, While):
            resolve_expr(stmt.cond, path + (("cond", None),))
            resolve_stmt(stmt.body, path + (("body", None),))
        elif isinstance(stmt, For):
            scopes.append({})
            if stmt.init is not None:
                resolve_stmt(stmt.init, path + (("init", None),))
            if stmt.cond is not None:
                resolve_expr(stmt.cond, path + (("cond", None),))
            if stmt.update is not None:
                resolve_expr(stmt.update, path + (("update", None),))
            resolve_stmt(stmt.body, path + (("body", None),))
            scopes.pop()
        elif isinstance(stmt, Switch):
            resolve_expr(stmt.selector, path + (("selector", None),))
            for ci, case in enumerate(stmt.cases):
                scopes.append({})
                resolve_stmts(case.body, path + (("cases", ci),), "body")
                scopes.pop()
            if stmt.default_body is not None:
                scopes.append({})
                resolve_stmts(stmt.default_body, path, "default_body")
                scopes.pop()
        elif isinstance(stmt, TryCatch):
            resolve_stmt(stmt.body, path + (("body", None),))
            scopes.append({})
            declare(stmt.exc_name, "exc", path)
            resolve_stmt(stmt.handler, path + (("handler", None),))
            scopes.pop()
        elif isinstance(stmt, Return):
            if stmt.value is not None:
                resolve_expr(stmt.value, path + (("value", None),))
        elif isinstance(stmt, Assert):
            resolve_expr(stmt.expr, path + (("expr", None),))
        # Break/Continue carry no names.

    for i, param in enumerate(ast.params):
        declare(param.name, "param", (("params", i),))
    resolve_stmt(ast.body, (("body", None),))

    for _, node in walk(ast):
        if isinstance(node, Ident):
            info.all_names.add(node.name)
    info.all_names |= collect_names(ast)
    return info


def _expr_children(expr: Expr):
    """(step, child) pairs for expression nodes, in source order."""
    if isinstance(expr, FieldAccess):
        yield ("receiver", None), expr.receiver
    elif isinstance(expr, Call):
        if expr.receiver is not None:
            yield ("receiver", None), expr.receiver
        for i, arg in enumerate(expr.args):
            yield ("args", i), arg
    elif isinstance(expr, Unary):
        yield ("operand", None), expr.operand
    elif isinstance(expr, Binary):
        yield ("left", None), expr.left
        yield ("right", None), expr.right
    elif isinstance(expr, Ternary):
        yield ("cond", None), expr.cond
        yield ("if_true", None), expr.if_true
        yield ("if_false", None), expr.if_false
    elif isinstance(expr, New):
        for i, arg in enumerate(expr.args):
            yield ("args", i), arg
    elif isinstance(expr, Cast):
        yield ("operand", None), expr.operand
    elif isinstance(expr, ArrayIndex):
        yield ("array", None), expr.array
        yield ("index", None), expr.index
    elif isinstance(expr, Assign):
        yield ("target", None), expr.target
        yield ("value", None), expr.value


# ── read/write sets ──────────────────────────────────────────────


def rw_set(stmt: Stmt, scopes: Optional[ScopeInfo] = None) -> RwSet:
    """Names read and written by `stmt`, with call count and control flag.

    Name-granular and conservative: external names participate like
    locals, and container mutation (field or element stores) both reads
    and writes the base variable.
    """
    reads: set[str] = set()
    writes: set[str] = set()
    calls = 0
    control = False

    def base_name(expr: Expr) -> Optional[str]:
        while isinstance(expr, (FieldAccess, ArrayIndex)):
            expr = expr.receiver if isinstance(expr, FieldAccess) else expr.array
        return expr.name if isinstance(expr, Ident) else None

    def visit_write_target(target: Expr, compound: bool) -> None:
        name = base_name(target)
        if name is not None:
            writes.add(name)
        if compound or not isinstance(target, Ident):
            visit_expr(target)

    def visit_expr(expr: Expr) -> None:
        nonlocal calls
        if isinstance(expr, Ident):
            reads.add(expr.name)
            return
        if isinstance(expr, Assign):
            visit_write_target(expr.target, compound=expr.op != "=")
            visit_expr(expr.value)
            return
        if isinstance(expr, Unary) and expr.op in ("++", "--"):
            visit_write_target(expr.operand, compound=True)
            return
        if isinstance(expr, Call):
            calls += 1
        for _, child in _expr_children(expr):
            visit_expr(child)

    def visit_stmt(s: Stmt) -> None:
        nonlocal control
        if isinstance(s, VarDecl):
            writes.add(s.name)
            if s.init is not None:
                visit_expr(s.init)
        elif isinstance(s, ExprStmt):
            visit_expr(s.expr)
        elif isinstance(s, Block):
            for inner in s.stmts:
                visit_stmt(inner)
        elif isinstance(s, If):
            visit_expr(s.cond)
            visit_stmt(s.then)
            if s.els is not None:
                visit_stmt(s.els)
        elif isinstance(s, While):
            visit_expr(s.cond)
            visit_stmt(s.body)
        elif isinstance(s, For):
            if s.init is not None:
                visit_stmt(s.init)
            if s.cond is not None:
                visit_expr(s.cond)
            if s.update is not None:
                visit_expr(s.update)
            visit_stmt(s.body)
        elif isinstance(s, Switch):
            visit_expr(s.selector)
            for case in s.cases:
                for inner in case.body:
                    visit_stmt(inner)
            for inner in s.default_body or ():
                visit_stmt(inner)
        elif isinstance(s, TryCatch):
            visit_stmt(s.body)
            writes.add(s.exc_name)
            visit_stmt(s.handler)
        elif isinstance(s, Return):
            control = True
            if s.value is not None:
                visit_expr(s.value)
        elif isinstance(s, (Break, Continue)):
            control = True
        elif isinstance(s, Assert):
            visit_expr(s.expr)

    visit_stmt(stmt)
    return RwSet(frozenset(reads), frozenset(writes), calls, control)


# ── candidate enumeration ────────────────────────────────────────


def enumerate_candidates(
    ast: MethodAst,
    kind: TransformKind,
    rng_seed: int = 0,
    relaxed_calls: bool = False,
    scopes: Optional[ScopeInfo] = None,
) -> list[CandidateSite]:
    """All applicable sites of `kind`, deterministic for (ast, kind, seed).

    The seed only matters for TC and UN, whose single site is a seeded
    uniform choice among qualifying positions.
    """
    if scopes is None:
        scopes = resolve_scopes(ast)
    if kind == TransformKind.VN:
        return _vn_sites(ast, scopes)
    if kind == TransformKind.BX:
        return _bx_sites(ast, scopes)
    if kind == TransformKind.LX:
        return _lx_sites(ast)
    if kind == TransformKind.SF:
        return _sf_sites(ast)
    if kind == TransformKind.PS:
        return _ps_sites(ast, relaxed_calls)
    if kind == TransformKind.TC:
        return _tc_sites(ast, rng_seed)
    if kind == TransformKind.UN:
        return _un_sites(ast, rng_seed)
    raise ValueError(f"unknown transformation kind: {kind!r}")


def _vn_sites(ast: MethodAst, scopes: ScopeInfo) -> list[CandidateSite]:
    sites = []
    first_decl = {}
    for decl in scopes.decls:
        if decl.name not in first_decl:
            first_decl[decl.name] = decl
    for name in scopes.declared_names():
        sites.append(CandidateSite(TransformKind.VN, first_decl[name].path, name))
    return sites


def _bx_sites(ast: MethodAst, scopes: ScopeInfo) -> list[CandidateSite]:
    sites = []
    for idx, decl in enumerate(scopes.decls):
        if decl.kind != "local":
            continue
        node = get_at(ast, decl.path)
        if not isinstance(node, VarDecl) or node.type_name != "boolean":
            continue
        if not isinstance(node.init, BoolLit):
            continue
        if all(_bx_occurrence_ok(ast, occ) for occ in scopes.occurrences[idx]):
            sites.append(CandidateSite(TransformKind.BX, decl.path, decl.name))
    return sites


def _bx_occurrence_ok(ast: MethodAst, occ: Path) -> bool:
    """True when the occurrence is a plain read, a negated read, or the
    target of a boolean-literal assignment."""
    parent = get_at(ast, occ[:-1]) if occ else None
    if isinstance(parent, Assign) and occ[-1] == ("target", None):
        return parent.op == "=" and isinstance(parent.value, BoolLit)
    if isinstance(parent, Unary) and parent.op in ("++", "--"):
        return False
    return True  # reads flip between v and !v, wherever they sit


def _lx_sites(ast: MethodAst) -> list[CandidateSite]:
    sites = []
    for path, node in walk(ast):
        if isinstance(node, (For, While)) and not _has_loop_continue(node.body):
            sites.append(CandidateSite(TransformKind.LX, path))
    return sites


def _has_loop_continue(block: Block) -> bool:
    """Continue statements targeting the enclosing loop (switches do not
    capture continue; nested loops do)."""

    def scan(stmt: Stmt) -> bool:
        if isinstance(stmt, Continue):
            return True
        if isinstance(stmt, (For, While)):
            return False
        if isinstance(stmt, Block):
            return any(scan(s) for s in stmt.stmts)
        if isinstance(stmt, If):
            return scan(stmt.then) or (stmt.els is not None and scan(stmt.els))
        if isinstance(stmt, Switch):
            return any(scan(s) for case in stmt.cases for s in case.body) or any(
                scan(s) for s in stmt.default_body or ()
            )
        if isinstance(stmt, TryCatch):
            return scan(stmt.body) or scan(stmt.handler)
        return False

    return any(scan(s) for s in block.stmts)


def _sf_sites(ast: MethodAst) -> list[CandidateSite]:
    sites = []
    for path, node in walk(ast):
        if isinstance(node, Switch) and _sf_eligible(node):
            sites.append(CandidateSite(TransformKind.SF, path))
    return sites


def _sf_eligible(switch: Switch) -> bool:
    """Every non-empty case body ends in break or return and no case falls
    through; bodies may not break out of the switch anywhere else."""
    for case in switch.cases:
        if not case.body:
            continue
        if not case.terminated:
            return False
        trimmed = case.body[:-1] if isinstance(case.body[-1], Break) else case.body
        if any(_has_switch_break(s) for s in trimmed):
            return False
    dflt = switch.default_body or ()
    trimmed_dflt = dflt[:-1] if dflt and isinstance(dflt[-1], Break) else dflt
    if any(_has_switch_break(s) for s in trimmed_dflt):
        return False
    return True


def _has_switch_break(stmt: Stmt) -> bool:
    """Break statements that would target the enclosing switch."""
    if isinstance(stmt, Break):
        return True
    if isinstance(stmt, (For, While, Switch)):
        return False  # break rebinds to the inner construct
    if isinstance(stmt, Block):
        return any(_has_switch_break(s) for s in stmt.stmts)
    if isinstance(stmt, If):
        return _has_switch_break(stmt.then) or (
            stmt.els is not None and _has_switch_break(stmt.els)
        )
    if isinstance(stmt, TryCatch):
        return _has_switch_break(stmt.body) or _has_switch_break(stmt.handler)
    return False


def _blocks_in_document_order(ast: MethodAst) -> list[tuple[Path, Block]]:
    # walk() is preorder, which is document order for these nodes.
    return [(path, node) for path, node in walk(ast) if isinstance(node, Block)]


def _ps_sites(ast: MethodAst, relaxed_calls: bool) -> list[CandidateSite]:
    sites = []
    for path, block in _blocks_in_document_order(ast):
        rws = [rw_set(s) for s in block.stmts]
        for i in range(len(block.stmts) - 1):
            a, b = rws[i], rws[i + 1]
            if a.control or b.control:
                continue
            if a.writes & (b.reads | b.writes):
                continue
            if b.writes & (a.reads | a.writes):
                continue
            if not relaxed_calls and a.calls > 0 and b.calls > 0:
                continue
            sites.append(CandidateSite(TransformKind.PS, path, (i, i + 1)))
    return sites


def _tc_sites(ast: MethodAst, rng_seed: int) -> list[CandidateSite]:
    options: list[tuple[Path, int]] = []
    for path, block in _blocks_in_document_order(ast):
        for i, stmt in enumerate(block.stmts):
            if isinstance(stmt, VarDecl):
                continue
            if rw_set(stmt).control:
                continue
            options.append((path, i))
    if not options:
        return []
    rng = random.Random(derive_seed(rng_seed, "TC"))
    path, idx = options[rng.randrange(len(options))]
    return [CandidateSite(TransformKind.TC, path, idx)]


def _un_sites(ast: MethodAst, rng_seed: int) -> list[CandidateSite]:
    options: list[tuple[Path, int]] = []
    for path, block in _blocks_in_document_order(ast):
        for i in range(len(block.stmts) + 1):
            options.append((path, i))
    rng = random.Random(derive_seed(rng_seed, "UN"))
    path, idx = options[rng.randrange(len(options))]
    return [CandidateSite(TransformKind.UN, path, idx)]
