"""Tree-walking reference interpreter and differential equivalence checker.

The interpretable subset covers int/long/boolean/String values with
two's-complement 64-bit wrapping arithmetic, truncating division, the
structured statements, and two builtin calls: `equals` on strings and
`printStackTrace` (a no-op) on caught exception values. Anything else
raises UnsupportedConstruct; equivalence checking never fakes semantics.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .analysis import derive_seed
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

DEFAULT_STEP_BUDGET = 100_000

_I64_MIN = -(1 << 63)
_I64_MASK = (1 << 64) - 1


class Unit:
    """Result of void methods and no-op builtins."""

    _instance: Optional["Unit"] = None

    def __new__(cls) -> "Unit":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unit"


UNIT = Unit()
Value = Union[int, bool, str, Unit]


class UnsupportedConstruct(Exception):
    """The method steps outside the interpretable subset."""


class _Signal(Exception):
    pass


class _BreakSignal(_Signal):
    pass


class _ContinueSignal(_Signal):
    pass


class _ReturnSignal(_Signal):
    def __init__(self, value: Value):
        self.value = value


class _RuntimeFault(_Signal):
    """Catchable evaluation fault: division by zero or a failed assert."""


class _StepLimit(_Signal):
    pass


_UNINITIALIZED = object()


@dataclass(frozen=True)
class ExecOutcome:
    kind: str  # "value" | "div_by_zero" | "step_limit"
    value: Optional[Value]
    trace_len: int

    def result_key(self) -> tuple:
        """Comparison key: outcome kind plus exactly-typed value."""
        if self.kind != "value":
            return (self.kind,)
        return ("value", type(self.value).__name__, None if isinstance(self.value, Unit) else self.value)

    def describe(self) -> str:
        if self.kind == "value":
            return f"value {self.value!r}"
        return self.kind

    def to_json(self) -> dict:
        value = self.value
        if isinstance(value, Unit):
            value = "unit"
        return {"kind": self.kind, "value": value, "trace_len": self.trace_len}


_INTERPRETABLE_TYPES = frozenset({"int", "long", "boolean", "String"})


def wrap64(n: int) -> int:
    """Two's-complement 64-bit wrap."""
    return ((n - _I64_MIN) & _I64_MASK) + _I64_MIN


class _Interp:
    def __init__(self, step_budget: int):
        self.budget = step_budget
        self.steps = 0
        self.scopes: list[dict[str, object]] = []

    # ── environment ─────────────────────────────────────────────

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> None:
        self.scopes.pop()

    def declare(self, name: str, value: object) -> None:
        self.scopes[-1][name] = value

    def load(self, name: str) -> Value:
        for scope in reversed(self.scopes):
            if name in scope:
                value = scope[name]
                if value is _UNINITIALIZED:
                    raise UnsupportedConstruct(f"read of uninitialized variable {name!r}")
                return value  # type: ignore[return-value]
        raise UnsupportedConstruct(f"unknown name {name!r} (external state)")

    def store(self, name: str, value: Value) -> None:
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        raise UnsupportedConstruct(f"assignment to unknown name {name!r}")

    # ── statements ───────────────────────────────────────────────

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise _StepLimit()

    def exec_stmt(self, stmt: Stmt) -> None:
        self.tick()
        if isinstance(stmt, VarDecl):
            value = _UNINITIALIZED if stmt.init is None else self.eval(stmt.init)
            self.declare(stmt.name, value)
        elif isinstance(stmt, ExprStmt):
            self.eval(stmt.expr)
        elif isinstance(stmt, Block):
            self.push()
            try:
                for inner in stmt.stmts:
                    self.exec_stmt(inner)
            finally:
                self.pop()
        elif isinstance(stmt, If):
            if self.truth(stmt.cond):
                self.exec_stmt(stmt.then)
            elif stmt.els is not None:
                self.exec_stmt(stmt.els)
        elif isinstance(stmt, While):
            while self.truth(stmt.cond):
                try:
                    self.exec_stmt(stmt.body)
                except _BreakSignal:
                    break
                except _ContinueSignal:
                    continue
        elif isinstance(stmt, For):
            self.push()
            try:
                if stmt.init is not None:
                    self.exec_stmt(stmt.init)
                while stmt.cond is None or self.truth(stmt.cond):
                    try:
                        self.exec_stmt(stmt.body)
                    except _BreakSignal:
                        break
                    except _ContinueSignal:
                        pass
                    if stmt.update is not None:
                        self.eval(stmt.update)
            finally:
                self.pop()
        elif isinstance(stmt, Switch):
            self.exec_switch(stmt)
        elif isinstance(stmt, Return):
            raise _ReturnSignal(UNIT if stmt.value is None else self.eval(stmt.value))
        elif isinstance(stmt, Break):
            raise _BreakSignal()
        elif isinstance(stmt, Continue):
            raise _ContinueSignal()
        elif isinstance(stmt, TryCatch):
            try:
                self.exec_stmt(stmt.body)
            except _RuntimeFault:
                self.push()
                try:
                    self.declare(stmt.exc_name, UNIT)
                    self.exec_stmt(stmt.handler)
                finally:
                    self.pop()
        elif isinstance(stmt, Assert):
            if not self.truth(stmt.expr):
                raise _RuntimeFault()
        else:
            raise UnsupportedConstruct(f"cannot execute {type(stmt).__name__}")

    def exec_switch(self, stmt: Switch) -> None:
        selector = self.eval(stmt.selector)
        if not isinstance(selector, (int, str)) or isinstance(selector, bool):
            raise UnsupportedConstruct("switch selector must be int, long, or String")
        matched = None
        for ci, case in enumerate(stmt.cases):
            for label in case.labels:
                if self.label_matches(selector, label):
                    matched = ci
                    break
            if matched is not None:
                break
        bodies: list[tuple[Stmt, ...]] = []
        if matched is not None:
            bodies.extend(case.body for case in stmt.cases[matched:])
            if stmt.default_body is not None:
                bodies.append(stmt.default_body)
        elif stmt.default_body is not None:
            bodies.append(stmt.default_body)
        try:
            for body in bodies:  # fall through until break/return
                self.push()
                try:
                    for inner in body:
                        self.exec_stmt(inner)
                finally:
                    self.pop()
        except _BreakSignal:
            pass

    def label_matches(self, selector: Value, label: Expr) -> bool:
        if isinstance(label, (IntLit, LongLit)):
            return isinstance(selector, int) and not isinstance(selector, bool) and selector == label.value
        if isinstance(label, StringLit):
            return isinstance(selector, str) and selector == label.value
        raise UnsupportedConstruct("non-literal case label")

    # ── expressions ──────────────────────────────────────────────

    def truth(self, expr: Expr) -> bool:
        value = self.eval(expr)
        if not isinstance(value, bool):
            raise UnsupportedConstruct("condition is not a boolean")
        return value

    def eval(self, expr: Expr) -> Value:
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, LongLit):
            return expr.value
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, StringLit):
            return expr.value
        if isinstance(expr, DoubleLit):
            raise UnsupportedConstruct("floating-point values are not interpretable")
        if isinstance(expr, Ident):
            return self.load(expr.name)
        if isinstance(expr, Assign):
            return self.eval_assign(expr)
        if isinstance(expr, Unary):
            return self.eval_unary(expr)
        if isinstance(expr, Binary):
            return self.eval_binary(expr)
        if isinstance(expr, Ternary):
            return self.eval(expr.if_true) if self.truth(expr.cond) else self.eval(expr.if_false)
        if isinstance(expr, Call):
            return self.eval_call(expr)
        if isinstance(expr, Cast):
            return self.eval_cast(expr)
        if isinstance(expr, (FieldAccess, ArrayIndex, New)):
            raise UnsupportedConstruct(f"cannot evaluate {type(expr).__name__}")
        raise UnsupportedConstruct(f"cannot evaluate {type(expr).__name__}")

    def eval_assign(self, expr: Assign) -> Value:
        if not isinstance(expr.target, Ident):
            raise UnsupportedConstruct("only plain variables are assignable")
        if expr.op == "=":
            value = self.eval(expr.value)
        elif expr.op == "+=" and isinstance(current := self.load(expr.target.name), str):
            value = current + self.stringify(self.eval(expr.value))
        else:
            current = self.load(expr.target.name)
            value = self.arith(expr.op[0], current, self.eval(expr.value))
        self.store(expr.target.name, value)
        return value

    def eval_unary(self, expr: Unary) -> Value:
        if expr.op == "!":
            operand = self.eval(expr.operand)
            if not isinstance(operand, bool):
                raise UnsupportedConstruct("'!' needs a boolean operand")
            return not operand
        if expr.op == "-":
            operand = self.eval(expr.operand)
            self.require_int(operand)
            return wrap64(-operand)
        if expr.op in ("++", "--"):
            if not isinstance(expr.operand, Ident):
                raise UnsupportedConstruct("increment target must be a variable")
            old = self.load(expr.operand.name)
            self.require_int(old)
            new = wrap64(old + (1 if expr.op == "++" else -1))
            self.store(expr.operand.name, new)
            return old if expr.postfix else new
        raise UnsupportedConstruct(f"unknown unary operator {expr.op!r}")

    def eval_binary(self, expr: Binary) -> Value:
        op = expr.op
        if op == "&&":
            return self.truth(expr.left) and self.truth(expr.right)
        if op == "||":
            return self.truth(expr.left) or self.truth(expr.right)
        left = self.eval(expr.left)
        right = self.eval(expr.right)
        if op in ("==", "!="):
            equal = self.values_equal(left, right)
            return equal if op == "==" else not equal
        if op in ("<", "<=", ">", ">="):
            self.require_int(left)
            self.require_int(right)
            return {"<": left < right, "<=": left <= right, ">": left > right, ">=": left >= right}[op]
        if op == "+" and (isinstance(left, str) or isinstance(right, str)):
            return self.stringify(left) + self.stringify(right)
        return self.arith(op, left, right)

    def values_equal(self, left: Value, right: Value) -> bool:
        if isinstance(left, bool) != isinstance(right, bool):
            raise UnsupportedConstruct("'==' operand types differ")
        if isinstance(left, str) != isinstance(right, str):
            raise UnsupportedConstruct("'==' operand types differ")
        if isinstance(left, Unit) or isinstance(right, Unit):
            raise UnsupportedConstruct("'==' on a non-value")
        return left == right

    def stringify(self, value: Value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, (int, str)):
            return str(value)
        raise UnsupportedConstruct("cannot convert value to String")

    def arith(self, op: str, left: Value, right: Value) -> int:
        self.require_int(left)
        self.require_int(right)
        if op == "+":
            return wrap64(left + right)
        if op == "-":
            return wrap64(left - right)
        if op == "*":
            return wrap64(left * right)
        if op in ("/", "%"):
            if right == 0:
                raise _RuntimeFault()
            quotient = abs(left) // abs(right)
            if (left < 0) != (right < 0):
                quotient = -quotient
            quotient = wrap64(quotient)  # Long.MIN / -1 wraps
            if op == "/":
                return quotient
            return wrap64(left - quotient * right)
        raise UnsupportedConstruct(f"unknown operator {op!r}")

    def require_int(self, value: Value) -> None:
        if isinstance(value, bool) or not isinstance(value, int):
            raise UnsupportedConstruct("arithmetic needs int operands")

    def eval_call(self, expr: Call) -> Value:
        if expr.name == "printStackTrace" and expr.receiver is not None and not expr.args:
            self.eval(expr.receiver)
            return UNIT
        if expr.name == "equals" and expr.receiver is not None and len(expr.args) == 1:
            receiver = self.eval(expr.receiver)
            if isinstance(receiver, str):
                arg = self.eval(expr.args[0])
                return isinstance(arg, str) and receiver == arg
            raise UnsupportedConstruct("'equals' builtin needs a String receiver")
        raise UnsupportedConstruct(f"call to unknown method {expr.name!r}")

    def eval_cast(self, expr: Cast) -> Value:
        value = self.eval(expr.operand)
        target = expr.type_name
        if target in ("int", "long"):
            self.require_int(value)
            return value
        if target == "boolean":
            if not isinstance(value, bool):
                raise UnsupportedConstruct("cast to boolean of a non-boolean")
            return value
        if target == "String":
            if not isinstance(value, str):
                raise UnsupportedConstruct("cast to String of a non-String")
            return value
        raise UnsupportedConstruct(f"cast to non-interpretable type {target!r}")


def interpret(
    ast: MethodAst, args: list[Value], step_budget: int = DEFAULT_STEP_BUDGET
) -> ExecOutcome:
    """Run a method on argument values; deterministic, loop-bounded.

    Raises UnsupportedConstruct when the method (on this input path) uses
    anything outside the interpretable subset.
    """
    if len(args) != len(ast.params):
        raise UnsupportedConstruct(
            f"arity mismatch: {len(ast.params)} parameters, {len(args)} arguments"
        )
    interp = _Interp(step_budget)
    interp.push()
    for param, arg in zip(ast.params, args):
        _check_param(param.type_name, arg)
        interp.declare(param.name, arg)
    try:
        try:
            interp.exec_stmt(ast.body)
            result: Value = UNIT
        except _ReturnSignal as sig:
            result = sig.value
        return ExecOutcome("value", result, interp.steps)
    except _RuntimeFault:
        return ExecOutcome("div_by_zero", None, interp.steps)
    except _StepLimit:
        return ExecOutcome("step_limit", None, interp.steps)
    except (_BreakSignal, _ContinueSignal):
        raise UnsupportedConstruct("break/continue outside a loop")


def _check_param(type_name: str, value: Value) -> None:
    if type_name in ("int", "long"):
        if isinstance(value, bool) or not isinstance(value, int):
            raise UnsupportedConstruct(f"argument for {type_name} parameter must be an int")
    elif type_name == "boolean":
        if not isinstance(value, bool):
            raise UnsupportedConstruct("argument for boolean parameter must be a bool")
    elif type_name == "String":
        if not isinstance(value, str):
            raise UnsupportedConstruct("argument for String parameter must be a str")
    else:
        raise UnsupportedConstruct(f"parameter type {type_name!r} is not interpretable")


# ── differential equivalence ─────────────────────────────────────

_INT_POOL = (-3, -2, -1, 0, 1, 2, 3, 100, -100, (1 << 63) - 1, -(1 << 63), (1 << 31) - 1)
_STRING_POOL = ("", "a", "b", "ab", "xy", "value", "0")


@dataclass
class Disagreement:
    args: list[Value]
    original: ExecOutcome
    variant: ExecOutcome

    def to_json(self) -> dict:
        return {
            "args": ["unit" if isinstance(a, Unit) else a for a in self.args],
            "original": self.original.to_json(),
            "variant": self.variant.to_json(),
        }


@dataclass
class EquivalenceReport:
    equivalent: bool
    trials: int
    compared: int
    skipped: int
    disagreements: list[Disagreement] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "trials": self.trials,
            "compared": self.compared,
            "skipped": self.skipped,
            "disagreements": [d.to_json() for d in self.disagreements],
        }


def sample_args(params, rng: random.Random) -> list[Value]:
    args: list[Value] = []
    for param in params:
        if param.type_name in ("int", "long"):
            args.append(rng.choice(_INT_POOL))
        elif param.type_name == "boolean":
            args.append(rng.random() < 0.5)
        elif param.type_name == "String":
            args.append(rng.choice(_STRING_POOL))
        else:
            raise UnsupportedConstruct(f"parameter type {param.type_name!r} is not interpretable")
    return args


def check_equivalence(
    p: MethodAst,
    q: MethodAst,
    trials: int = 16,
    seed: int = 0,
    step_budget: int = DEFAULT_STEP_BUDGET,
    skip_original_errors: bool = False,
) -> EquivalenceReport:
    """Differential interpretation on seeded random argument vectors.

    Equivalent iff no compared trial disagrees (one-sided errors compare
    as disagreements). With `skip_original_errors`, trials on which the
    original itself faults are skipped; error-handling rewrites are only
    accountable for normal executions.
    """
    if [p2.type_name for p2 in p.params] != [q2.type_name for q2 in q.params]:
        raise UnsupportedConstruct("signatures differ; nothing to compare")
    rng = random.Random(derive_seed(seed, "equivalence", p.name))
    report = EquivalenceReport(equivalent=True, trials=trials, compared=0, skipped=0)
    for _ in range(trials):
        args = sample_args(p.params, rng)
        out_p = interpret(p, args, step_budget)
        if skip_original_errors and out_p.kind == "div_by_zero":
            report.skipped += 1
            continue
        out_q = interpret(q, args, step_budget)
        report.compared += 1
        if out_p.result_key() != out_q.result_key():
            report.disagreements.append(Disagreement(args, out_p, out_q))
    report.equivalent = not report.disagreements
    return report
