"""AST node types for MethodLang, a small Java-like subject language.

All nodes are immutable dataclasses; rewrites build new trees and share
untouched subtrees. Nodes are addressed by paths: tuples of
``(field_name, index)`` steps, where ``index`` is ``None`` for scalar
child fields and an integer for tuple fields.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Iterator, Optional, Union

PathStep = tuple[str, Optional[int]]
Path = tuple[PathStep, ...]

PRIMITIVE_TYPES = frozenset({"int", "long", "double", "boolean", "void"})

# String fields holding identifier or type text; structural_eq can ignore these.
_NAME_FIELDS = frozenset({"name", "type_name", "return_type", "exc_type", "exc_name"})
_SKIP_FIELDS = frozenset({"source_span"})


class Node:
    __slots__ = ()


class Expr(Node):
    __slots__ = ()


class Stmt(Node):
    __slots__ = ()


# ── Expressions ──────────────────────────────────────────────────


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class LongLit(Expr):
    value: int


@dataclass(frozen=True)
class DoubleLit(Expr):
    # Kept as source text; doubles print back verbatim and never execute.
    text: str


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class StringLit(Expr):
    value: str


@dataclass(frozen=True)
class Ident(Expr):
    name: str


@dataclass(frozen=True)
class FieldAccess(Expr):
    receiver: Expr
    name: str


@dataclass(frozen=True)
class Call(Expr):
    receiver: Optional[Expr]
    name: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Unary(Expr):
    # op in {"!", "-", "++", "--"}; ++/-- may be postfix
    op: str
    operand: Expr
    postfix: bool = False


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Ternary(Expr):
    cond: Expr
    if_true: Expr
    if_false: Expr


@dataclass(frozen=True)
class New(Expr):
    type_name: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Cast(Expr):
    type_name: str
    operand: Expr


@dataclass(frozen=True)
class ArrayIndex(Expr):
    array: Expr
    index: Expr


@dataclass(frozen=True)
class Assign(Expr):
    # Statement position only (expression statements and for headers).
    target: Expr
    op: str  # "=", "+=", "-=", "*=", "/=", "%="
    value: Expr


# ── Statements ───────────────────────────────────────────────────


@dataclass(frozen=True)
class Block(Stmt):
    stmts: tuple[Stmt, ...]


@dataclass(frozen=True)
class VarDecl(Stmt):
    type_name: str
    name: str
    init: Optional[Expr]


@dataclass(frozen=True)
class ExprStmt(Stmt):
    expr: Expr


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: Block
    els: Optional[Stmt] = None  # Block, or If for an else-if chain


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    body: Block


@dataclass(frozen=True)
class For(Stmt):
    init: Optional[Stmt]  # VarDecl or ExprStmt
    cond: Optional[Expr]
    update: Optional[Expr]
    body: Block


@dataclass(frozen=True)
class SwitchCase(Node):
    labels: tuple[Expr, ...]  # literal constants, pairwise distinct
    body: tuple[Stmt, ...]

    @property
    def terminated(self) -> bool:
        return bool(self.body) and isinstance(self.body[-1], (Break, Return))


@dataclass(frozen=True)
class Switch(Stmt):
    selector: Expr
    cases: tuple[SwitchCase, ...]
    default_body: Optional[tuple[Stmt, ...]] = None


@dataclass(frozen=True)
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass(frozen=True)
class Break(Stmt):
    pass


@dataclass(frozen=True)
class Continue(Stmt):
    pass


@dataclass(frozen=True)
class TryCatch(Stmt):
    body: Block
    exc_type: str
    exc_name: str
    handler: Block


@dataclass(frozen=True)
class Assert(Stmt):
    expr: Expr


@dataclass(frozen=True)
class Param(Node):
    type_name: str
    name: str


@dataclass(frozen=True)
class MethodAst(Node):
    name: str
    params: tuple[Param, ...]
    return_type: str
    body: Block
    source_span: tuple[int, int] = (0, 0)


# ── Tree plumbing ────────────────────────────────────────────────


def node_children(node: Node) -> list[tuple[PathStep, Node]]:
    """Child nodes of `node` in field-declaration order."""
    out: list[tuple[PathStep, Node]] = []
    for f in fields(node):  # type: ignore[arg-type]
        value = getattr(node, f.name)
        if isinstance(value, Node):
            out.append(((f.name, None), value))
        elif isinstance(value, tuple) and value and isinstance(value[0], Node):
            for i, item in enumerate(value):
                out.append(((f.name, i), item))
    return out


def walk(root: Node, prefix: Path = ()) -> Iterator[tuple[Path, Node]]:
    """Preorder traversal yielding (path, node), root included."""
    stack: list[tuple[Path, Node]] = [(prefix, root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        children = node_children(node)
        for step, child in reversed(children):
            stack.append((path + (step,), child))


def get_at(root: Node, path: Path) -> Node:
    node = root
    for field_name, idx in path:
        value = getattr(node, field_name)
        node = value if idx is None else value[idx]
    return node


def replace_at(root: Node, path: Path, new_node: Node) -> Node:
    """Rebuild the spine from `root` to `path`, substituting `new_node`."""
    if not path:
        return new_node
    (field_name, idx), rest = path[0], path[1:]
    value = getattr(root, field_name)
    if idx is None:
        rebuilt = replace_at(value, rest, new_node)
    else:
        items = list(value)
        items[idx] = replace_at(items[idx], rest, new_node)
        rebuilt = tuple(items)
    return replace(root, **{field_name: rebuilt})


def find_by_identity(root: Node, target: Node) -> Optional[Path]:
    """Path of the exact object `target` within `root`, or None."""
    for path, node in walk(root):
        if node is target:
            return path
    return None


def node_count(root: Node) -> int:
    return sum(1 for _ in walk(root))


def parent_path(path: Path) -> Path:
    return path[:-1]


def structural_eq(a: Node, b: Node, ignore_identifiers: bool = False) -> bool:
    """Node-for-node isomorphism.

    With `ignore_identifiers`, identifier and type-name terminal texts are
    skipped; node kinds, shape, operators and literal values still compare.
    Source spans never participate.
    """
    if type(a) is not type(b):
        return False
    for f in fields(a):  # type: ignore[arg-type]
        if f.name in _SKIP_FIELDS:
            continue
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, Node) or isinstance(vb, Node):
            if not (isinstance(va, Node) and isinstance(vb, Node)):
                return False
            if not structural_eq(va, vb, ignore_identifiers):
                return False
        elif isinstance(va, tuple) and va and isinstance(va[0], Node):
            if not isinstance(vb, tuple) or len(va) != len(vb):
                return False
            if not all(structural_eq(x, y, ignore_identifiers) for x, y in zip(va, vb)):
                return False
        elif ignore_identifiers and f.name in _NAME_FIELDS:
            continue
        elif va != vb:
            return False
    return True


def base_type(type_name: str) -> str:
    """Element type of an array type; identity otherwise."""
    return type_name[:-2] if type_name.endswith("[]") else type_name


def collect_names(root: Node) -> set[str]:
    """Every identifier-like string in the tree (names and type names).

    This is the reference set for fresh-name generation: a fresh name must
    not collide with anything that lexes as an identifier in the method.
    """
    names: set[str] = set()
    for _, node in walk(root):
        for f in fields(node):  # type: ignore[arg-type]
            if f.name in _NAME_FIELDS:
                value = getattr(node, f.name)
                if isinstance(value, str) and value:
                    names.add(base_type(value))
    return names


def fresh_name(prefix: str, taken: set[str]) -> str:
    n = 0
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"


def statement_count(method: MethodAst) -> int:
    """Statement nodes in the body, excluding Block wrappers."""
    return sum(
        1
        for _, node in walk(method.body)
        if isinstance(node, Stmt) and not isinstance(node, Block)
    )


ExprOrNone = Union[Expr, None]
