"""Prediction producers: label normalization, the builtin heuristic
analyzer, and a line-delimited JSON adapter for external analyzers.

Wire protocol (JSONL over stdin/stdout), one object per line:
    request   {"id": "<method-id>", "source": "<method text>"}
    response  {"id": "<method-id>", "label": "<raw label>"}
Responses may arrive out of order; `id` is the join key. This is the
language-neutral seam for plugging in real models.
"""

from __future__ import annotations

import json
import queue
import re
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field

from .nodes import (
    Call,
    FieldAccess,
    Ident,
    MethodAst,
    Node,
    TryCatch,
    VarDecl,
    node_children,
)

_WORD_RE = re.compile(r"[A-Za-z]+|[0-9]+")
_CAMEL_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+")

ERROR_LABEL_TEXT = "error"


class EmptyLabel(Exception):
    pass


class AnalyzerUnavailable(Exception):
    pass


@dataclass(frozen=True)
class Label:
    subtokens: tuple[str, ...]

    def __str__(self) -> str:
        return " ".join(self.subtokens)


@dataclass(frozen=True)
class PredictionRecord:
    method_id: str
    analyzer_id: str
    label: Label
    raw: str
    flags: tuple[str, ...] = ()


def normalize_label(raw: str) -> Label:
    """Lowercase subtoken sequence: split on separators, camelCase
    boundaries, and letter/digit boundaries; acronym runs split before a
    trailing capital-plus-lowercase."""
    if not raw or not raw.strip():
        raise EmptyLabel("blank label")
    subtokens: list[str] = []
    for word in _WORD_RE.findall(raw):
        if word.isdigit():
            subtokens.append(word)
        else:
            subtokens.extend(part.lower() for part in _CAMEL_RE.findall(word))
    if not subtokens:
        raise EmptyLabel(f"no subtokens in {raw!r}")
    return Label(tuple(subtokens))


def error_label() -> Label:
    return Label((ERROR_LABEL_TEXT,))


# ── builtin analyzer ─────────────────────────────────────────────


def builtin_predict(ast: MethodAst, method_id: str | None = None) -> PredictionRecord:
    """Deterministic heuristic prediction from body identifiers.

    Identifier occurrences score 1 each; every distinct called name adds
    a flat 3 (call sites carry the strongest naming signal). The label is
    the top two subtokens by (score desc, first occurrence asc). Only the
    body is scanned, so the method's own name never leaks in from the
    signature. The heuristic is deliberately identifier-driven, so
    renaming-style rewrites can actually move it.
    """
    scores: dict[str, int] = {}
    first_seen: dict[str, int] = {}
    counter = iter(range(1 << 30))
    call_names: set[str] = set()

    def add(name: str, weight: int) -> None:
        for sub in normalize_label(name).subtokens:
            scores[sub] = scores.get(sub, 0) + weight
            if sub not in first_seen:
                first_seen[sub] = next(counter)

    def visit(node: Node) -> None:
        if isinstance(node, Ident):
            add(node.name, 1)
        elif isinstance(node, VarDecl):
            add(node.name, 1)
        elif isinstance(node, FieldAccess):
            add(node.name, 1)
        elif isinstance(node, TryCatch):
            add(node.exc_name, 1)
        elif isinstance(node, Call) and node.name not in call_names:
            call_names.add(node.name)
            add(node.name, 3)
        for _, child in node_children(node):
            visit(child)

    visit(ast.body)
    mid = method_id if method_id is not None else ast.name
    if not scores:
        return PredictionRecord(mid, "builtin", Label(("unknown",)), "unknown")
    ranked = sorted(scores, key=lambda sub: (-scores[sub], first_seen[sub]))
    top = tuple(ranked[:2])
    return PredictionRecord(mid, "builtin", Label(top), " ".join(top))


# ── external analyzer adapter ────────────────────────────────────


@dataclass
class _Pending:
    order: list[str] = field(default_factory=list)
    results: dict[str, str] = field(default_factory=dict)
    flags: dict[str, list[str]] = field(default_factory=dict)


def external_predict(
    batch: list[tuple[str, str]],
    analyzer_cmd: str | list[str],
    timeout: float = 10.0,
) -> list[PredictionRecord]:
    """Stream a batch through an external analyzer process.

    Returns one record per input, in input order. Per-item failures
    (malformed lines, missing or blank responses, stalls longer than
    `timeout`) yield flagged records labeled [error]; only a process
    that cannot start raises AnalyzerUnavailable.
    """
    cmd = shlex.split(analyzer_cmd) if isinstance(analyzer_cmd, str) else list(analyzer_cmd)
    try:
        proc = subprocess.Popen(
            cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )
    except OSError as exc:
        raise AnalyzerUnavailable(f"cannot start analyzer {cmd!r}: {exc}") from exc

    pending = _Pending(order=[mid for mid, _ in batch])
    expected = set(pending.order)

    def feed() -> None:
        try:
            assert proc.stdin is not None
            for mid, source in batch:
                proc.stdin.write(json.dumps({"id": mid, "source": source}) + "\n")
            proc.stdin.close()
        except (BrokenPipeError, OSError):
            pass

    lines: queue.Queue = queue.Queue()

    def drain() -> None:
        assert proc.stdout is not None
        for line in proc.stdout:
            lines.put(line)
        lines.put(None)

    feeder = threading.Thread(target=feed, daemon=True)
    reader = threading.Thread(target=drain, daemon=True)
    feeder.start()
    reader.start()

    remaining = set(expected)
    last_progress = time.monotonic()
    eof = False
    while remaining and not eof:
        wait = timeout - (time.monotonic() - last_progress)
        if wait <= 0:
            break
        try:
            line = lines.get(timeout=wait)
        except queue.Empty:
            continue
        if line is None:
            eof = True
            break
        line = line.strip()
        if not line:
            continue
        try:
            message = json.loads(line)
            mid = message["id"]
            raw = message["label"]
            if not isinstance(mid, str) or not isinstance(raw, str):
                raise ValueError("id and label must be strings")
        except (ValueError, KeyError, TypeError):
            continue  # malformed line; the missing item surfaces at the end
        if mid in remaining:
            pending.results[mid] = raw
            remaining.discard(mid)
            last_progress = time.monotonic()

    proc.kill()
    proc.wait()

    records = []
    for mid in pending.order:
        if mid in pending.results:
            raw = pending.results[mid]
            try:
                records.append(PredictionRecord(mid, "external", normalize_label(raw), raw))
            except EmptyLabel:
                records.append(
                    PredictionRecord(mid, "external", error_label(), raw, ("empty_label",))
                )
        else:
            flag = "timeout" if not eof and mid in remaining else "missing"
            records.append(PredictionRecord(mid, "external", error_label(), "", (flag,)))
    return records
