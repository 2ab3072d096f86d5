"""Prediction-change oracle and metrics.

A prediction change is any discrepancy between the label predicted for
the original method and for its transformed variant. Every (truth,
before, after) triple falls in exactly one outcome category:

    CCP   correct prediction stays correct
    CIP   correct prediction becomes incorrect
    WWSP  wrong prediction stays the same wrong label
    WCP   wrong prediction becomes correct
    WWDP  wrong prediction changes to another wrong prediction

Counts are additive across shards; percentages are recomputed from
merged counts, rounded half-up to two decimals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Iterable, Optional, Sequence

from .analyzer import Label


class OutcomeCategory(str, Enum):
    CCP = "CCP"
    CIP = "CIP"
    WWSP = "WWSP"
    WCP = "WCP"
    WWDP = "WWDP"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


CHANGED_CATEGORIES = frozenset(
    {OutcomeCategory.CIP, OutcomeCategory.WCP, OutcomeCategory.WWDP}
)


def classify_outcome(truth: Label, before: Label, after: Label) -> tuple[OutcomeCategory, bool]:
    changed = before != after
    if before == truth:
        category = OutcomeCategory.CCP if after == truth else OutcomeCategory.CIP
    elif after == before:
        category = OutcomeCategory.WWSP
    elif after == truth:
        category = OutcomeCategory.WCP
    else:
        category = OutcomeCategory.WWDP
    return category, changed


@dataclass(frozen=True)
class EvaluationRecord:
    method_id: str
    kind: str
    mode: str
    truth: Label
    before: Label
    after: Label
    category: OutcomeCategory
    changed: bool
    stmt_count: int

    @staticmethod
    def build(
        method_id: str,
        kind: str,
        mode: str,
        truth: Label,
        before: Label,
        after: Label,
        stmt_count: int,
    ) -> "EvaluationRecord":
        category, changed = classify_outcome(truth, before, after)
        return EvaluationRecord(
            method_id, kind, mode, truth, before, after, category, changed, stmt_count
        )

    def to_json(self) -> dict:
        return {
            "method_id": self.method_id,
            "kind": self.kind,
            "mode": self.mode,
            "truth": list(self.truth.subtokens),
            "before": list(self.before.subtokens),
            "after": list(self.after.subtokens),
            "category": self.category.value,
            "changed": self.changed,
            "stmt_count": self.stmt_count,
        }

    @staticmethod
    def from_json(data: dict) -> "EvaluationRecord":
        return EvaluationRecord(
            method_id=data["method_id"],
            kind=data["kind"],
            mode=data["mode"],
            truth=Label(tuple(data["truth"])),
            before=Label(tuple(data["before"])),
            after=Label(tuple(data["after"])),
            category=OutcomeCategory(data["category"]),
            changed=bool(data["changed"]),
            stmt_count=int(data["stmt_count"]),
        )


def write_records(records: Iterable[EvaluationRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_json()) + "\n")


def read_records(path) -> list[EvaluationRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(EvaluationRecord.from_json(json.loads(line)))
    return records


# ── metrics ──────────────────────────────────────────────────────


def round_half_up(value: float, places: int = 2) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def _pct(numerator: int, denominator: int) -> Optional[float]:
    if denominator == 0:
        return None
    # Exact rational percentage, then half-up: float division could sit on
    # the wrong side of a .005 boundary.
    exact = (Decimal(numerator) * 100) / Decimal(denominator)
    return float(exact.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class MetricsCell:
    kind: str
    cell: str
    originals: int
    variants: int
    changed: int
    change_pct: Optional[float]
    ccp: Optional[float]
    cip: Optional[float]
    wwsp: Optional[float]
    wcp: Optional[float]
    wwdp: Optional[float]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "cell": self.cell,
            "originals": self.originals,
            "variants": self.variants,
            "changed": self.changed,
            "change_pct": self.change_pct,
            "ccp": self.ccp,
            "cip": self.cip,
            "wwsp": self.wwsp,
            "wcp": self.wcp,
            "wwdp": self.wwdp,
        }


@dataclass
class MetricsReport:
    group_by: tuple[str, ...]
    cells: tuple[MetricsCell, ...]

    def cell(self, kind: str, cell: str = "all") -> MetricsCell:
        for entry in self.cells:
            if entry.kind == kind and entry.cell == cell:
                return entry
        raise KeyError((kind, cell))

    def to_json(self) -> dict:
        return {"group_by": list(self.group_by), "cells": [c.to_json() for c in self.cells]}

    def to_csv(self) -> str:
        lines = ["kind,cell,originals,variants,changed,change_pct,ccp,cip,wwsp,wcp,wwdp"]
        for c in self.cells:
            pcts = [c.change_pct, c.ccp, c.cip, c.wwsp, c.wcp, c.wwdp]
            rendered = ["" if p is None else f"{p:.2f}" for p in pcts]
            cell_text = f'"{c.cell}"' if "," in c.cell else c.cell
            lines.append(
                f"{c.kind},{cell_text},{c.originals},{c.variants},{c.changed}," + ",".join(rendered)
            )
        return "\n".join(lines) + "\n"


@dataclass
class _Tally:
    method_ids: set
    variants: int = 0
    changed: int = 0
    ccp: int = 0
    cip: int = 0
    wwsp: int = 0
    wcp: int = 0
    wwdp: int = 0

    def add(self, record: EvaluationRecord) -> None:
        self.method_ids.add(record.method_id)
        self.variants += 1
        if record.changed:
            self.changed += 1
        name = record.category.value.lower()
        setattr(self, name, getattr(self, name) + 1)

    def to_cell(self, kind: str, cell: str) -> MetricsCell:
        return MetricsCell(
            kind=kind,
            cell=cell,
            originals=len(self.method_ids),
            variants=self.variants,
            changed=self.changed,
            change_pct=_pct(self.changed, self.variants),
            ccp=_pct(self.ccp, self.variants),
            cip=_pct(self.cip, self.variants),
            wwsp=_pct(self.wwsp, self.variants),
            wcp=_pct(self.wcp, self.variants),
            wwdp=_pct(self.wwdp, self.variants),
        )


def compute_metrics(
    records: Sequence[EvaluationRecord], group_by: tuple[str, ...] = ("kind",)
) -> MetricsReport:
    """Per-cell counts and percentages; pure and order-insensitive.

    `group_by` may contain "kind" and "mode". Cells with zero variants
    simply do not occur (they would carry null percentages).
    """
    unknown = set(group_by) - {"kind", "mode"}
    if unknown:
        raise ValueError(f"unknown grouping dimensions: {sorted(unknown)}")
    tallies: dict[tuple[str, str], _Tally] = {}
    for record in records:
        kind = record.kind if "kind" in group_by else "all"
        cell = record.mode if "mode" in group_by else "all"
        tallies.setdefault((kind, cell), _Tally(set())).add(record)
    cells = tuple(
        tallies[key].to_cell(*key) for key in sorted(tallies.keys())
    )
    return MetricsReport(tuple(group_by), cells)


DEFAULT_BUCKET_EDGES = (10, 20, 50, 100, 200, 500)


def bucket_label(stmt_count: int, edges: Sequence[int]) -> str:
    """Buckets [1,e1], (e1,e2], ..., (ek,inf); right edges inclusive."""
    if not edges:
        return "[1,inf)"
    lower = 1
    for edge in edges:
        if stmt_count <= edge:
            return f"[{lower},{edge}]" if lower == 1 else f"({lower},{edge}]"
        lower = edge
    return f"({lower},inf)"


def bucket_by_length(
    records: Sequence[EvaluationRecord], edges: Sequence[int] = DEFAULT_BUCKET_EDGES
) -> MetricsReport:
    """Change metrics per original-method-length bucket, over all kinds."""
    edges = tuple(edges)
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("bucket edges must be strictly increasing")
    tallies: dict[str, _Tally] = {}
    for record in records:
        tallies.setdefault(bucket_label(record.stmt_count, edges), _Tally(set())).add(record)
    if edges:
        ordered = [bucket_label(e, edges) for e in edges] + [f"({edges[-1]},inf)"]
    else:
        ordered = ["[1,inf)"]
    cells = tuple(
        tallies[label].to_cell("all", label) for label in ordered if label in tallies
    )
    return MetricsReport(("bucket",), cells)


def split_by_correctness(records: Sequence[EvaluationRecord]) -> MetricsReport:
    """Two cells keyed by whether the original prediction was correct."""
    tallies: dict[str, _Tally] = {}
    for record in records:
        cell = "correct" if record.before == record.truth else "incorrect"
        tallies.setdefault(cell, _Tally(set())).add(record)
    cells = tuple(
        tallies[cell].to_cell("all", cell) for cell in ("correct", "incorrect") if cell in tallies
    )
    return MetricsReport(("correctness",), cells)
