from __future__ import annotations

import pytest

from metamorph import (
    ModeUnsupported,
    TransformKind,
    apply,
    boolean_exchange,
    check_equivalence,
    enumerate_candidates,
    loop_exchange,
    node_count,
    parse,
    permute_statement,
    print_method,
    structural_eq,
    switch_to_if,
    try_catch_insertion,
    unused_statement_insertion,
    variable_renaming,
)
from metamorph.nodes import Block, TryCatch, VarDecl, get_at, walk
from metamorph.transforms import MODE_ALL


def site_of(ast, kind, index=0, **kwargs):
    return enumerate_candidates(ast, kind, **kwargs)[index]


def apply_one(source: str, kind: TransformKind, index=0, rng_seed=0):
    ast = parse(source)
    site = site_of(ast, kind, index, rng_seed=rng_seed)
    fn = {
        TransformKind.VN: variable_renaming,
        TransformKind.BX: boolean_exchange,
        TransformKind.LX: loop_exchange,
        TransformKind.SF: switch_to_if,
        TransformKind.PS: permute_statement,
        TransformKind.TC: try_catch_insertion,
        TransformKind.UN: unused_statement_insertion,
    }[kind]
    return ast, fn(ast, site)


# ── VN ───────────────────────────────────────────────────────────


def test_vn_renames_all_occurrences(compare_to_source, compare_to_renamed):
    ast = parse(compare_to_source)
    variant = variable_renaming(ast, site_of(ast, TransformKind.VN, 0))
    assert structural_eq(variant.ast, parse(compare_to_renamed))
    assert variant.source.count("var0") == 3


def test_vn_is_structure_blind_but_not_name_blind(compare_to_source):
    ast = parse(compare_to_source)
    variant = variable_renaming(ast, site_of(ast, TransformKind.VN, 0))
    assert structural_eq(ast, variant.ast, ignore_identifiers=True)
    assert not structural_eq(ast, variant.ast, ignore_identifiers=False)


def test_vn_freshness_skips_existing_names():
    ast = parse("void f(int a) { int var0 = a; var0 = var0 + 1; }")
    variant = variable_renaming(ast, site_of(ast, TransformKind.VN, 0))
    assert "var1 " in variant.source or "var1)" in variant.source
    assert "int var0" in variant.source  # the unrelated variable is untouched


def test_vn_renames_shadowed_declarations_consistently():
    ast = parse("void f() { int y = 0; { int y = 1; y = y + 1; } y = 5; }")
    variant = variable_renaming(ast, site_of(ast, TransformKind.VN, 0))
    assert "y" not in variant.source.replace("varN", "")
    reparsed = parse(variant.source)
    assert structural_eq(reparsed, variant.ast)


# ── BX ───────────────────────────────────────────────────────────


def test_bx_flips_literals_and_reads():
    source = "void f(int c) { boolean done = false; while (!done) { if (c > 0) { done = true; } c = c - 1; } }"
    expected = "void f(int c) { boolean done = true; while (done) { if (c > 0) { done = false; } c = c - 1; } }"
    ast, variant = apply_one(source, TransformKind.BX)
    assert structural_eq(variant.ast, parse(expected))
    report = check_equivalence(ast, variant.ast, trials=16, seed=11)
    assert report.equivalent


def test_bx_is_an_involution():
    source = "void f(int c) { boolean done = false; while (!done) { if (c > 0) { done = true; } c = c - 1; } }"
    ast, variant = apply_one(source, TransformKind.BX)
    site = site_of(variant.ast, TransformKind.BX, 0)
    back = boolean_exchange(variant.ast, site)
    assert structural_eq(back.ast, ast)


def test_bx_swaps_negated_and_plain_read_counts():
    source = "void f(boolean unused) { boolean v = true; if (v) { g(); } if (!v) { h(); } if (v) { g(); } }"
    ast, variant = apply_one(source, TransformKind.BX)
    assert variant.source.count("!v") == 2
    assert variant.source.count("(v)") == 1


# ── LX ───────────────────────────────────────────────────────────


def test_lx_for_to_while_desugaring():
    ast, variant = apply_one("void f() { for (int i = 0; i < 3; i++) { s(); } }", TransformKind.LX)
    expected = parse("void f() { { int i = 0; while (i < 3) { s(); i++; } } }")
    assert structural_eq(variant.ast, expected)


def test_lx_empty_for_header_becomes_while_true():
    ast, variant = apply_one("void f() { for (;;) { if (g()) { break; } } }", TransformKind.LX)
    expected = parse("void f() { { while (true) { if (g()) { break; } } } }")
    assert structural_eq(variant.ast, expected)


def test_lx_while_to_for():
    ast, variant = apply_one("void f(boolean c) { while (c) { b(); } }", TransformKind.LX)
    expected = parse("void f(boolean c) { for (; c;) { b(); } }")
    assert structural_eq(variant.ast, expected)


def test_lx_preserves_behavior():
    source = "int f(int n) { int s = 0; for (int i = 0; i < n; i++) { s = s + i; } return s; }"
    ast, variant = apply_one(source, TransformKind.LX)
    assert check_equivalence(ast, variant.ast, trials=16, seed=2).equivalent


# ── SF ───────────────────────────────────────────────────────────


def test_sf_builds_if_chain_with_hoisted_selector():
    source = "void f(int x, int r) { switch (x) { case 0: r = 1; break; default: r = 2; break; } }"
    expected = "void f(int x, int r) { { int sel0 = x; if (sel0 == 0) { r = 1; } else { r = 2; } } }"
    ast, variant = apply_one(source, TransformKind.SF)
    assert structural_eq(variant.ast, parse(expected))


def test_sf_differential_on_selector_values():
    from metamorph import interpret

    source = "int f(int x) { int r = 0; switch (x) { case 0: r = 1; break; default: r = 2; break; } return r; }"
    ast, variant = apply_one(source, TransformKind.SF)
    for x in (-1, 0, 1):
        assert interpret(ast, [x]).result_key() == interpret(variant.ast, [x]).result_key()


def test_sf_without_default_omits_else():
    ast, variant = apply_one(
        "void f(int x, int r) { switch (x) { case 4: r = 1; break; } }", TransformKind.SF
    )
    expected = parse("void f(int x, int r) { { int sel0 = x; if (sel0 == 4) { r = 1; } } }")
    assert structural_eq(variant.ast, expected)


def test_sf_branch_count_matches_case_count():
    source = (
        "void f(int x, int r) { switch (x) { case 0: r = 0; break; case 1: r = 1; break; "
        "case 2: r = 2; break; } }"
    )
    ast, variant = apply_one(source, TransformKind.SF)
    assert variant.source.count("if (") == 3


def test_sf_multi_label_case_becomes_disjunction():
    source = "void f(int x, int r) { switch (x) { case 0: case 1: r = 1; break; default: r = 9; } }"
    ast, variant = apply_one(source, TransformKind.SF)
    assert "sel0 == 0 || sel0 == 1" in variant.source
    report = check_equivalence(ast, variant.ast, trials=16, seed=4)
    assert report.equivalent


def test_sf_string_labels_compare_with_equals():
    source = (
        'int f(String s) { int r = 0; switch (s) { case "a": r = 1; break; '
        'case "b": r = 2; break; default: r = 3; } return r; }'
    )
    ast, variant = apply_one(source, TransformKind.SF)
    assert 'sel0.equals("a")' in variant.source
    assert check_equivalence(ast, variant.ast, trials=16, seed=5).equivalent


def test_sf_evaluates_effectful_selector_once():
    source = (
        "int f(int x) { int r = 0; switch (x++) { case 0: r = x; break; default: r = -x; break; } "
        "return r + x; }"
    )
    ast, variant = apply_one(source, TransformKind.SF)
    assert check_equivalence(ast, variant.ast, trials=16, seed=6).equivalent


# ── PS ───────────────────────────────────────────────────────────


def test_ps_swaps_adjacent_statements():
    ast, variant = apply_one("void f() { int a = 1; int b = 2; }", TransformKind.PS)
    expected = parse("void f() { int b = 2; int a = 1; }")
    assert structural_eq(variant.ast, expected)


def test_ps_preserves_statement_subtree_multiset():
    source = "void f(int x, int y) { x = x + 1; y = y * 2; int a = 3; }"
    ast = parse(source)
    sites = enumerate_candidates(ast, TransformKind.PS)
    assert sites
    for site in sites:
        variant = permute_statement(ast, site)
        before = sorted(repr(s) for s in get_at(ast, site.path).stmts)
        after = sorted(repr(s) for s in get_at(variant.ast, site.path).stmts)
        assert before == after  # dataclass repr is structural


def test_ps_is_an_involution():
    ast = parse("void f() { int a = 1; int b = 2; }")
    site = site_of(ast, TransformKind.PS)
    once = permute_statement(ast, site)
    twice = permute_statement(once.ast, site)
    assert structural_eq(twice.ast, ast)


# ── TC ───────────────────────────────────────────────────────────


def test_tc_wraps_statement_in_try_catch():
    ast, variant = apply_one("void f(int x) { x = x + 1; }", TransformKind.TC)
    expected = parse(
        "void f(int x) { try { x = x + 1; } catch (Exception ex0) { ex0.printStackTrace(); } }"
    )
    assert structural_eq(variant.ast, expected)


def test_tc_freshens_exception_name():
    ast, variant = apply_one("void f(int ex0) { ex0 = ex0 + 1; }", TransformKind.TC)
    assert "catch (Exception ex1)" in variant.source


def test_tc_preserves_normal_executions():
    source = "int f(int a) { int r = a; r = r * 2; return r; }"
    ast, variant = apply_one(source, TransformKind.TC)
    assert check_equivalence(ast, variant.ast, trials=16, seed=7, skip_original_errors=True).equivalent


def test_tc_preserves_faulting_division_runs_when_not_skipped():
    # The wrapped statement is not the faulting one, so outcomes must agree
    # even on fault runs.
    source = "int f(int a) { int r = 10 / a; r = r + 1; return r; }"
    ast = parse(source)
    sites = enumerate_candidates(ast, TransformKind.TC, rng_seed=3)
    variant = try_catch_insertion(ast, sites[0])
    report = check_equivalence(ast, variant.ast, trials=16, seed=8, skip_original_errors=True)
    assert report.equivalent


# ── UN ───────────────────────────────────────────────────────────


def test_un_inserts_fixed_unused_declaration():
    ast, variant = apply_one("void f() { a(); }", TransformKind.UN, rng_seed=5)
    assert 'String unused0 = "metamorph";' in variant.source
    inserted = [
        node
        for _, node in walk(variant.ast)
        if isinstance(node, VarDecl) and node.name == "unused0"
    ]
    assert len(inserted) == 1
    assert node_count(variant.ast) == node_count(ast) + node_count(inserted[0])


def test_un_deleting_inserted_node_restores_original():
    source = "void f(int x) { x = 1; x = 2; }"
    ast = parse(source)
    site = site_of(ast, TransformKind.UN, rng_seed=9)
    variant = unused_statement_insertion(ast, site)
    block = get_at(variant.ast, site.path)
    restored_stmts = block.stmts[: site.payload] + block.stmts[site.payload + 1 :]
    from metamorph.nodes import replace_at

    restored = replace_at(variant.ast, site.path, Block(restored_stmts))
    assert structural_eq(restored, ast)


def test_un_behavior_unchanged():
    source = "int f(int n) { int s = n; s = s + 2; return s; }"
    ast, variant = apply_one(source, TransformKind.UN, rng_seed=10)
    assert check_equivalence(ast, variant.ast, trials=16, seed=12).equivalent


# ── apply / modes ────────────────────────────────────────────────


def test_apply_single_place_yields_one_variant_per_site():
    ast = parse("void f(int a) { int b = 1; int c = 2; }")
    variants = apply(ast, TransformKind.VN)
    assert len(variants) == 3
    assert all(v.mode == "single" for v in variants)


def test_apply_all_place_renames_in_declaration_order():
    ast = parse("void f(int a) { int b = a; int c = b; }")
    (variant,) = apply(ast, TransformKind.VN, mode=MODE_ALL)
    expected = parse("void f(int var0) { int var1 = var0; int var2 = var1; }")
    assert structural_eq(variant.ast, expected)
    assert len(variant.sites) == 3


def test_apply_all_place_rejected_for_ps_tc_un():
    ast = parse("void f(int x) { x = 1; x = 2; }")
    for kind in (TransformKind.PS, TransformKind.TC, TransformKind.UN):
        with pytest.raises(ModeUnsupported):
            apply(ast, kind, mode=MODE_ALL)


def test_apply_all_place_handles_nested_loops():
    source = (
        "int f(int n) { int s = 0; for (int i = 0; i < 3; i++) { int j = 0; "
        "while (j < 2) { s = s + i + j; j = j + 1; } } return s; }"
    )
    ast = parse(source)
    (variant,) = apply(ast, TransformKind.LX, mode=MODE_ALL)
    assert "for (" not in variant.source.split("return")[0] or "while (" in variant.source
    assert structural_eq(parse(variant.source), variant.ast)
    assert check_equivalence(ast, variant.ast, trials=16, seed=13).equivalent


def test_apply_empty_when_no_sites():
    ast = parse("void f() { }")
    assert apply(ast, TransformKind.LX) == []


def test_every_enumerated_site_applies_cleanly():
    from metamorph import gen_corpus
    from metamorph.transforms import apply_at

    for method in gen_corpus(40, 77):
        for kind in TransformKind:
            for site in enumerate_candidates(method, kind, rng_seed=3):
                variant = apply_at(method, site)
                assert structural_eq(parse(variant.source), variant.ast)


def test_variants_carry_reparsable_source():
    ast = parse("void f(int a) { int b = a + 1; int c = 2; }")
    for kind in TransformKind:
        for variant in apply(ast, kind, seed=21):
            assert structural_eq(parse(variant.source), variant.ast)
