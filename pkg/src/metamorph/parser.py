"""Recursive-descent parser producing normalized MethodLang ASTs.

Normalizations applied while building the tree:
  * single-statement if/loop bodies are wrapped in Blocks ("else if" chains
    stay as If nodes in the else slot);
  * double negation (!!e) collapses to e;
  * consecutive case labels merge into one case group.

Anything outside the subset raises ParseError; callers treat the method
as ineligible rather than aborting a corpus run.
"""

from __future__ import annotations

from typing import Optional

from .lexer import ParseError, Token, tokenize
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
    Param,
    Return,
    Stmt,
    StringLit,
    Switch,
    SwitchCase,
    Ternary,
    TryCatch,
    Unary,
    VarDecl,
    While,
)

_MODIFIERS = frozenset(
    {
        "public", "private", "protected", "static", "final", "synchronized",
        "abstract", "native", "strictfp", "transient", "volatile",
    }
)
_TYPE_KEYWORDS = ("int", "long", "double", "boolean", "void")
_ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=", "%=")
# Tokens that may start an expression, used to spot casts.
_EXPR_START = frozenset({"IDENT", "INT", "LONG", "DOUBLE", "STRING", "BOOL", "(", "!", "new"})


def parse(source: str) -> MethodAst:
    """Parse one method declaration; the whole input must be consumed."""
    return _Parser(tokenize(source), source).parse_method()


class _Parser:
    def __init__(self, tokens: list[Token], source: str):
        self.tokens = tokens
        self.source = source
        self.pos = 0

    # ── token access ─────────────────────────────────────────────

    def _cur(self) -> Token:
        return self.tokens[self.pos]

    def _peek(self, offset: int = 0) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def _at(self, kind: str) -> bool:
        return self._cur().kind == kind

    def _advance(self) -> Token:
        tok = self._cur()
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return tok

    def _expect(self, kind: str) -> Token:
        tok = self._cur()
        if tok.kind != kind:
            got = tok.text if tok.kind != "EOF" else "end of input"
            raise ParseError(f"expected {kind!r}, got {got!r}", tok.line, tok.col)
        return self._advance()

    def _error(self, message: str) -> ParseError:
        tok = self._cur()
        return ParseError(message, tok.line, tok.col)

    # ── method header ────────────────────────────────────────────

    def parse_method(self) -> MethodAst:
        start = self._cur().offset
        while self._at("IDENT") and self._cur().text in _MODIFIERS:
            self._advance()
        return_type = self._parse_type()
        name = self._expect("IDENT").text
        self._expect("(")
        params: list[Param] = []
        if not self._at(")"):
            while True:
                if self._at("IDENT") and self._cur().text == "final":
                    self._advance()
                ptype = self._parse_type()
                pname = self._expect("IDENT").text
                params.append(Param(ptype, pname))
                if not self._at(","):
                    break
                self._advance()
        self._expect(")")
        if self._at("IDENT") and self._cur().text == "throws":
            self._advance()
            self._expect("IDENT")
            while self._at(","):
                self._advance()
                self._expect("IDENT")
        body = self._parse_block()
        end = self.tokens[self.pos - 1].offset + len(self.tokens[self.pos - 1].text)
        if not self._at("EOF"):
            raise self._error("trailing input after method body")
        return MethodAst(name, tuple(params), return_type, body, (start, end))

    def _parse_type(self) -> str:
        tok = self._cur()
        if tok.kind in _TYPE_KEYWORDS or tok.kind == "IDENT":
            self._advance()
        else:
            raise self._error(f"expected a type name, got {tok.text!r}")
        name = tok.text
        if self._at("[") and self._peek(1).kind == "]":
            self._advance()
            self._advance()
            name += "[]"
        return name

    # ── statements ───────────────────────────────────────────────

    def _parse_block(self) -> Block:
        self._expect("{")
        stmts: list[Stmt] = []
        while not self._at("}"):
            if self._at("EOF"):
                raise self._error("unbalanced '{': expected '}'")
            stmts.append(self._parse_stmt())
        self._advance()
        return Block(tuple(stmts))

    def _parse_stmt(self) -> Stmt:
        kind = self._cur().kind
        if kind == "{":
            return self._parse_block()
        if kind == "if":
            return self._parse_if()
        if kind == "while":
            return self._parse_while()
        if kind == "for":
            return self._parse_for()
        if kind == "switch":
            return self._parse_switch()
        if kind == "try":
            return self._parse_try()
        if kind == "return":
            self._advance()
            value = None if self._at(";") else self._parse_expr()
            self._expect(";")
            return Return(value)
        if kind == "break":
            self._advance()
            self._expect(";")
            return Break()
        if kind == "continue":
            self._advance()
            self._expect(";")
            return Continue()
        if kind == "assert":
            self._advance()
            expr = self._parse_expr()
            self._expect(";")
            return Assert(expr)
        if kind in _TYPE_KEYWORDS or self._starts_decl():
            decl = self._parse_var_decl()
            self._expect(";")
            return decl
        stmt = ExprStmt(self._parse_stmt_expr())
        self._expect(";")
        return stmt

    def _starts_decl(self) -> bool:
        # IDENT IDENT ("Foo bar") or IDENT [ ] IDENT ("Foo[] bar").
        if not self._at("IDENT"):
            return False
        if self._peek(1).kind == "IDENT":
            return True
        return (
            self._peek(1).kind == "["
            and self._peek(2).kind == "]"
            and self._peek(3).kind == "IDENT"
        )

    def _parse_var_decl(self) -> VarDecl:
        type_name = self._parse_type()
        name = self._expect("IDENT").text
        init = None
        if self._at("="):
            self._advance()
            init = self._parse_expr()
        if self._at(","):
            raise self._error("multiple declarators are not supported")
        return VarDecl(type_name, name, init)

    def _as_block(self, stmt: Stmt) -> Block:
        return stmt if isinstance(stmt, Block) else Block((stmt,))

    def _parse_if(self) -> If:
        self._advance()
        self._expect("(")
        cond = self._parse_expr()
        self._expect(")")
        then = self._as_block(self._parse_stmt())
        els: Optional[Stmt] = None
        if self._at("else"):
            self._advance()
            if self._at("if"):
                els = self._parse_if()
            else:
                els = self._as_block(self._parse_stmt())
        return If(cond, then, els)

    def _parse_while(self) -> While:
        self._advance()
        self._expect("(")
        cond = self._parse_expr()
        self._expect(")")
        return While(cond, self._as_block(self._parse_stmt()))

    def _parse_for(self) -> For:
        self._advance()
        self._expect("(")
        init: Optional[Stmt] = None
        if not self._at(";"):
            if self._cur().kind in _TYPE_KEYWORDS or self._starts_decl():
                init = self._parse_var_decl()
            else:
                init = ExprStmt(self._parse_stmt_expr())
        self._expect(";")
        cond = None if self._at(";") else self._parse_expr()
        self._expect(";")
        update = None if self._at(")") else self._parse_stmt_expr()
        self._expect(")")
        return For(init, cond, update, self._as_block(self._parse_stmt()))

    def _parse_switch(self) -> Switch:
        self._advance()
        self._expect("(")
        selector = self._parse_expr()
        self._expect(")")
        self._expect("{")
        cases: list[SwitchCase] = []
        default_body: Optional[tuple[Stmt, ...]] = None
        seen_labels: set[object] = set()
        while not self._at("}"):
            if default_body is not None:
                raise self._error("default clause must be the last switch group")
            labels: list[Expr] = []
            is_default = False
            while self._at("case") or self._at("default"):
                if self._at("default"):
                    if labels or is_default:
                        raise self._error("default may not share a label group")
                    is_default = True
                    self._advance()
                else:
                    if is_default:
                        raise self._error("default may not share a label group")
                    self._advance()
                    labels.append(self._parse_case_label(seen_labels))
                self._expect(":")
            if not labels and not is_default:
                raise self._error("expected 'case' or 'default' in switch body")
            stmts: list[Stmt] = []
            while not (self._at("case") or self._at("default") or self._at("}")):
                if self._at("EOF"):
                    raise self._error("unbalanced '{': expected '}'")
                stmts.append(self._parse_stmt())
            if is_default:
                default_body = tuple(stmts)
            else:
                cases.append(SwitchCase(tuple(labels), tuple(stmts)))
        self._advance()
        return Switch(selector, tuple(cases), default_body)

    def _parse_case_label(self, seen: set[object]) -> Expr:
        negate = False
        if self._at("-"):
            negate = True
            self._advance()
        tok = self._cur()
        label: Expr
        if tok.kind == "INT":
            self._advance()
            label = IntLit(-tok.value if negate else tok.value)  # type: ignore[operator]
        elif tok.kind == "LONG":
            self._advance()
            label = LongLit(-tok.value if negate else tok.value)  # type: ignore[operator]
        elif tok.kind == "STRING" and not negate:
            self._advance()
            label = StringLit(tok.value)  # type: ignore[arg-type]
        else:
            raise self._error("case label must be an int, long, or string literal")
        key = (
            ("num", label.value)
            if isinstance(label, (IntLit, LongLit))
            else ("str", label.value)
        )
        if key in seen:
            raise self._error("duplicate case label")
        seen.add(key)
        return label

    def _parse_try(self) -> TryCatch:
        self._advance()
        body = self._parse_block()
        self._expect("catch")
        self._expect("(")
        exc_type = self._parse_type()
        exc_name = self._expect("IDENT").text
        self._expect(")")
        handler = self._parse_block()
        if self._at("catch"):
            raise self._error("multiple catch clauses are not supported")
        if self._at("IDENT") and self._cur().text == "finally":
            raise self._error("finally clauses are not supported")
        return TryCatch(body, exc_type, exc_name, handler)

    # ── expressions ──────────────────────────────────────────────

    def _parse_stmt_expr(self) -> Expr:
        """Expression in statement position; permits a single assignment."""
        expr = self._parse_expr()
        if self._cur().kind in _ASSIGN_OPS:
            op = self._advance().kind
            if not isinstance(expr, (Ident, FieldAccess, ArrayIndex)):
                raise self._error("assignment target must be a variable, field, or element")
            value = self._parse_expr()
            if self._cur().kind in _ASSIGN_OPS:
                raise self._error("chained assignment is not supported")
            return Assign(expr, op, value)
        return expr

    def _parse_expr(self) -> Expr:
        return self._parse_ternary()

    def _parse_ternary(self) -> Expr:
        cond = self._parse_or()
        if self._at("?"):
            self._advance()
            if_true = self._parse_ternary()
            self._expect(":")
            if_false = self._parse_ternary()
            return Ternary(cond, if_true, if_false)
        return cond

    def _parse_or(self) -> Expr:
        left = self._parse_and()
        while self._at("||"):
            self._advance()
            left = Binary("||", left, self._parse_and())
        return left

    def _parse_and(self) -> Expr:
        left = self._parse_equality()
        while self._at("&&"):
            self._advance()
            left = Binary("&&", left, self._parse_equality())
        return left

    def _parse_equality(self) -> Expr:
        left = self._parse_relational()
        while self._cur().kind in ("==", "!="):
            op = self._advance().kind
            left = Binary(op, left, self._parse_relational())
        return left

    def _parse_relational(self) -> Expr:
        left = self._parse_additive()
        while self._cur().kind in ("<", ">", "<=", ">="):
            op = self._advance().kind
            left = Binary(op, left, self._parse_additive())
        return left

    def _parse_additive(self) -> Expr:
        left = self._parse_multiplicative()
        while self._cur().kind in ("+", "-"):
            op = self._advance().kind
            left = Binary(op, left, self._parse_multiplicative())
        return left

    def _parse_multiplicative(self) -> Expr:
        left = self._parse_unary()
        while self._cur().kind in ("*", "/", "%"):
            op = self._advance().kind
            left = Binary(op, left, self._parse_unary())
        return left

    def _parse_unary(self) -> Expr:
        kind = self._cur().kind
        if kind == "!":
            self._advance()
            operand = self._parse_unary()
            if isinstance(operand, Unary) and operand.op == "!" and not operand.postfix:
                return operand.operand  # !!e normalizes to e
            return Unary("!", operand)
        if kind == "-":
            self._advance()
            return Unary("-", self._parse_unary())
        if kind in ("++", "--"):
            op = self._advance().kind
            operand = self._parse_unary()
            if not isinstance(operand, (Ident, FieldAccess, ArrayIndex)):
                raise self._error(f"operand of prefix {op} must be assignable")
            return Unary(op, operand)
        if kind == "(" and self._looks_like_cast():
            self._advance()
            type_name = self._parse_type()
            self._expect(")")
            return Cast(type_name, self._parse_unary())
        return self._parse_postfix()

    def _looks_like_cast(self) -> bool:
        first = self._peek(1)
        if first.kind in ("int", "long", "double", "boolean"):
            j = 2
        elif first.kind == "IDENT":
            j = 2
        else:
            return False
        if self._peek(j).kind == "[" and self._peek(j + 1).kind == "]":
            j += 2
        if self._peek(j).kind != ")":
            return False
        after = self._peek(j + 1).kind
        if first.kind == "IDENT" and j == 2:
            # "(name)" is a cast only when clearly followed by an operand.
            return after in ("IDENT", "STRING", "INT", "LONG", "DOUBLE", "BOOL", "new")
        return after in _EXPR_START

    def _parse_postfix(self) -> Expr:
        expr = self._parse_primary()
        while True:
            kind = self._cur().kind
            if kind == ".":
                self._advance()
                name = self._expect("IDENT").text
                if self._at("("):
                    expr = Call(expr, name, self._parse_args())
                else:
                    expr = FieldAccess(expr, name)
            elif kind == "[":
                self._advance()
                index = self._parse_expr()
                self._expect("]")
                expr = ArrayIndex(expr, index)
            elif kind in ("++", "--"):
                op = self._advance().kind
                if not isinstance(expr, (Ident, FieldAccess, ArrayIndex)):
                    raise self._error(f"operand of postfix {op} must be assignable")
                return Unary(op, expr, postfix=True)
            else:
                return expr

    def _parse_args(self) -> tuple[Expr, ...]:
        self._expect("(")
        args: list[Expr] = []
        if not self._at(")"):
            args.append(self._parse_expr())
            while self._at(","):
                self._advance()
                args.append(self._parse_expr())
        self._expect(")")
        return tuple(args)

    def _parse_primary(self) -> Expr:
        tok = self._cur()
        if tok.kind == "INT":
            self._advance()
            return IntLit(tok.value)  # type: ignore[arg-type]
        if tok.kind == "LONG":
            self._advance()
            return LongLit(tok.value)  # type: ignore[arg-type]
        if tok.kind == "DOUBLE":
            self._advance()
            return DoubleLit(tok.text)
        if tok.kind == "STRING":
            self._advance()
            return StringLit(tok.value)  # type: ignore[arg-type]
        if tok.kind == "BOOL":
            self._advance()
            return BoolLit(tok.value)  # type: ignore[arg-type]
        if tok.kind == "IDENT":
            self._advance()
            if self._at("("):
                return Call(None, tok.text, self._parse_args())
            return Ident(tok.text)
        if tok.kind == "new":
            self._advance()
            type_name = self._parse_type()
            if type_name.endswith("[]") or self._at("["):
                raise self._error("array creation is not supported")
            return New(type_name, self._parse_args())
        if tok.kind == "(":
            self._advance()
            expr = self._parse_expr()
            self._expect(")")
            return expr
        got = tok.text if tok.kind != "EOF" else "end of input"
        raise self._error(f"expected an expression, got {got!r}")
