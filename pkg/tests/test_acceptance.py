"""Acceptance suite.

Runs every acceptance criterion at its stated tolerance and prints one
pass/fail line per criterion (visible with `pytest -s`). Criteria 1-3,
6, 7 run against the seeded 300-method corpus; 8 and 9 drive the real
CLI pipeline; 4 and 5 validate the metrics arithmetic against fixture
logs and random logs.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

import pytest

from metamorph import (
    Label,
    ModeUnsupported,
    TransformKind,
    apply,
    check_equivalence,
    compute_metrics,
    derive_seed,
    enumerate_candidates,
    gen_corpus,
    node_count,
    parse,
    split_by_correctness,
    structural_eq,
)
from metamorph.cli import main
from metamorph.evaluation import CHANGED_CATEGORIES, EvaluationRecord, OutcomeCategory
from metamorph.nodes import VarDecl, walk
from metamorph.transforms import MODE_ALL, MODE_SINGLE, apply_at
from test_evaluation import CATEGORY_ROW, build_category_fixture, build_change_fixture

CORPUS_SEED = 42
CORPUS_SIZE = 300


def _announce(number: int, description: str) -> None:
    print(f"PASS criterion {number:02d}: {description}")


@pytest.fixture(scope="module")
def corpus():
    return gen_corpus(CORPUS_SIZE, CORPUS_SEED)


@pytest.fixture(scope="module")
def all_variants(corpus):
    """[(method_index, variant)] across all kinds, both modes."""
    out = []
    for i, method in enumerate(corpus):
        seed = derive_seed(CORPUS_SEED, f"m{i:04d}")
        for kind in TransformKind:
            out.extend((i, v) for v in apply(method, kind, MODE_SINGLE, seed=seed))
        for kind in (TransformKind.VN, TransformKind.BX, TransformKind.LX, TransformKind.SF):
            out.extend((i, v) for v in apply(method, kind, MODE_ALL, seed=seed))
    return out


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One full CLI run over the seeded corpus; reused across criteria."""
    base = tmp_path_factory.mktemp("acceptance")
    corpus_dir = base / "corpus"
    out = base / "run"
    assert main(["gen-corpus", "--count", str(CORPUS_SIZE), "--seed", str(CORPUS_SEED),
                 "--out", str(corpus_dir)]) == 0
    args = ["run-all", "--input", str(corpus_dir), "--out", str(out),
            "--seed", str(CORPUS_SEED), "--workers", "1"]
    assert main(args) == 0
    return {"corpus_dir": corpus_dir, "out": out, "args": args}


def _snapshot(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name != "meta.json"
    }


def test_criterion_01_semantic_preservation(corpus, all_variants):
    started = time.monotonic()
    failures = []
    for i, variant in all_variants:
        report = check_equivalence(
            corpus[i],
            variant.ast,
            trials=16,
            seed=CORPUS_SEED,
            skip_original_errors=variant.kind is TransformKind.TC,
        )
        if not report.equivalent:
            failures.append((corpus[i].name, variant.kind, report.disagreements[0].to_json()))
    elapsed = time.monotonic() - started
    assert not failures, failures[:3]
    assert elapsed < 120, f"equivalence sweep took {elapsed:.1f}s"
    _announce(1, f"all {len(all_variants)} variants equivalent over 16 trials ({elapsed:.1f}s)")


def test_criterion_02_round_trip(corpus, all_variants):
    from metamorph import print_method

    for method in corpus:
        assert structural_eq(parse(print_method(method)), method)
    for _, variant in all_variants:
        assert structural_eq(parse(variant.source), variant.ast)
    _announce(2, f"parse-print identity on {len(corpus)} methods and {len(all_variants)} variants")


def test_criterion_03_structural_invariants(corpus, all_variants):
    from metamorph import boolean_exchange, permute_statement

    checked = {"VN": 0, "PS": 0, "UN": 0, "BX": 0}
    for i, variant in all_variants:
        original = corpus[i]
        if variant.kind is TransformKind.VN:
            assert structural_eq(original, variant.ast, ignore_identifiers=True)
            checked["VN"] += 1
        elif variant.kind is TransformKind.PS and variant.mode == MODE_SINGLE:
            from metamorph.nodes import get_at

            site = variant.sites[0]
            before = sorted(repr(s) for s in get_at(original, site.path).stmts)
            after = sorted(repr(s) for s in get_at(variant.ast, site.path).stmts)
            assert before == after
            back = permute_statement(variant.ast, site)
            assert structural_eq(back.ast, original)
            checked["PS"] += 1
        elif variant.kind is TransformKind.UN:
            added = node_count(variant.ast) - node_count(original)
            inserted = [
                n for _, n in walk(variant.ast)
                if isinstance(n, VarDecl) and n.name.startswith("unused")
            ]
            assert len(inserted) == 1
            assert added == node_count(inserted[0])
            checked["UN"] += 1
        elif variant.kind is TransformKind.BX and variant.mode == MODE_SINGLE:
            site = enumerate_candidates(variant.ast, TransformKind.BX)
            matching = [s for s in site if s.payload == variant.sites[0].payload]
            assert matching, "exchanged boolean must remain eligible"
            back = boolean_exchange(variant.ast, matching[0])
            assert structural_eq(back.ast, original)
            checked["BX"] += 1
    assert all(count > 0 for count in checked.values()), checked
    _announce(3, f"structural invariants hold ({checked})")


def test_criterion_04_metrics_arithmetic_fixtures():
    change = compute_metrics(
        build_change_fixture(variants=123123, changed=67622, originals=31113), ("kind",)
    ).cell("VN")
    assert abs(change.change_pct - 54.92) <= 0.01

    detail = compute_metrics(build_category_fixture(CATEGORY_ROW), ("kind",)).cell("VN")
    assert (detail.ccp, detail.cip, detail.wwsp, detail.wcp, detail.wwdp) == (
        14.54, 4.69, 38.42, 2.32, 40.03,
    )
    assert abs(sum((detail.ccp, detail.cip, detail.wwsp, detail.wcp, detail.wwdp)) - 100.00) <= 0.05
    _announce(4, "fixture logs reproduce the published change and category percentages")


def test_criterion_05_taxonomy_partition_on_random_log():
    rng = random.Random(1234)
    pool = [Label((w,)) for w in ("alpha", "beta", "gamma", "delta")]
    records = []
    for i in range(10_000):
        truth, before, after = (rng.choice(pool) for _ in range(3))
        records.append(
            EvaluationRecord.build(
                f"m{i % 97}", rng.choice(list(TransformKind)).value, "single",
                truth, before, after, rng.randrange(1, 600),
            )
        )
    counts = {}
    for record in records:
        counts[record.category] = counts.get(record.category, 0) + 1
        assert record.changed == (record.category in CHANGED_CATEGORIES)
    assert sum(counts.values()) == len(records)
    assert set(counts) <= set(OutcomeCategory)

    whole = compute_metrics(records, ("kind",))
    shards = [records[i::7] for i in range(7)]
    merged = compute_metrics([r for shard in shards for r in shard], ("kind",))
    assert whole.to_json() == merged.to_json()
    _announce(5, "partition, changed-equivalence, and shard merge hold on a 10k random log")


def test_criterion_06_tc_un_count_identities(pipeline):
    manifest = json.loads((pipeline["out"] / "manifest.json").read_text())
    for kind in ("TC", "UN"):
        eligible = sum(
            1 for m in manifest["methods"] if m["status"] == "ok" and m["sites"][kind] >= 1
        )
        variants = sum(1 for v in manifest["variants"] if v["kind"] == kind)
        assert variants == eligible, (kind, variants, eligible)
    un_total = sum(1 for v in manifest["variants"] if v["kind"] == "UN")
    ok_methods = sum(1 for m in manifest["methods"] if m["status"] == "ok")
    assert un_total == ok_methods  # every method with a body has exactly one UN site
    _announce(6, "TC and UN variant counts equal their eligible-original counts")


def test_criterion_07_mode_rules(corpus):
    for kind in (TransformKind.PS, TransformKind.TC, TransformKind.UN):
        with pytest.raises(ModeUnsupported):
            apply(corpus[0], kind, MODE_ALL, seed=1)

    multi_site_seen = {k: 0 for k in (TransformKind.VN, TransformKind.BX, TransformKind.LX, TransformKind.SF)}
    for method in corpus:
        for kind in multi_site_seen:
            sites = enumerate_candidates(method, kind, rng_seed=1)
            if len(sites) < 2:
                continue
            multi_site_seen[kind] += 1
            assert len(apply(method, kind, MODE_SINGLE, seed=1)) == len(sites)
            assert len(apply(method, kind, MODE_ALL, seed=1)) == 1
    assert multi_site_seen[TransformKind.VN] > 0
    assert multi_site_seen[TransformKind.LX] > 0
    _announce(7, f"mode rules hold (methods with >=2 sites checked: {multi_site_seen})")


def test_criterion_08_pipeline_determinism(pipeline):
    first = _snapshot(pipeline["out"])
    assert main(pipeline["args"]) == 0
    second = _snapshot(pipeline["out"])
    assert first.keys() == second.keys()
    different = [name for name in first if first[name] != second[name]]
    assert not different, different
    _announce(8, f"two identical runs produced {len(first)} identical files (modulo meta.json)")


def test_criterion_09_renaming_changes_predictions_end_to_end(pipeline):
    report = json.loads((pipeline["out"] / "report.json").read_text())
    vn_cells = [cell for cell in report["cells"] if cell["kind"] == "VN"]
    assert vn_cells
    change_pct = vn_cells[0]["change_pct"]
    assert change_pct is not None and change_pct > 0.0
    _announce(9, f"builtin analyzer's renaming prediction-change is strictly positive ({change_pct}%)")


def test_criterion_10_analyzer_protocol_at_scale(tmp_path):
    from metamorph.analyzer import external_predict, normalize_label
    from conftest import echo_cmd

    items = [(f"m{i:05d}", f"int f{i}(int a) {{ return a; }}") for i in range(10_000)]
    started = time.monotonic()
    records = external_predict(items, echo_cmd("--corrupt-every", "1000"), timeout=30.0)
    elapsed = time.monotonic() - started
    assert len(records) == 10_000
    assert [r.method_id for r in records] == [mid for mid, _ in items]
    flagged = [r for r in records if r.flags]
    assert len(flagged) == 10  # every 1000th response was malformed
    clean = [r for r in records if not r.flags]
    assert all(r.label == normalize_label(r.method_id) for r in clean)
    assert elapsed < 30, f"10k-item protocol round-trip took {elapsed:.1f}s"
    _announce(10, f"10k-item echo round-trip lost nothing and isolated 10 malformed lines ({elapsed:.1f}s)")
