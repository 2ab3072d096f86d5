"""Command-line pipeline driver.

Subcommands compose the full workflow: generate or ingest a corpus of
one-method files, produce transformed variants, collect predictions from
an analyzer, and evaluate prediction changes. A fixed seed makes every
output byte reproducible; timestamps live only in meta.json.

Exit codes: 0 success, 1 internal error (including self-check defects),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import os
import sys
import time
from pathlib import Path as FsPath

from . import __version__
from .analysis import (
    ALL_KINDS,
    DuplicateDeclaration,
    TransformKind,
    derive_seed,
    enumerate_candidates,
)
from .analyzer import (
    AnalyzerUnavailable,
    EmptyLabel,
    Label,
    builtin_predict,
    error_label,
    external_predict,
    normalize_label,
)
from .evaluation import (
    DEFAULT_BUCKET_EDGES,
    EvaluationRecord,
    bucket_by_length,
    compute_metrics,
    read_records,
    split_by_correctness,
    write_records,
)
from .generator import corpus_coverage, gen_corpus
from .interp import UnsupportedConstruct, check_equivalence
from .lexer import ParseError
from .nodes import statement_count, structural_eq
from .parser import parse
from .printer import print_method
from .transforms import MODE_ALL, MODE_SINGLE, ModeUnsupported, apply

_METHOD_SUFFIXES = (".mlang", ".java")


class UsageError(Exception):
    pass


@dataclasses.dataclass
class RunConfig:
    input_dir: str
    out_dir: str
    kinds: tuple[TransformKind, ...]
    mode: str
    seed: int
    analyzer: str
    edges: tuple[int, ...]
    relaxed_calls: bool
    self_check: bool
    workers: int

    def to_json(self) -> dict:
        data = dataclasses.asdict(self)
        data["kinds"] = [k.value for k in self.kinds]
        data["edges"] = list(self.edges)
        del data["workers"]  # execution knob; never changes outputs
        return data


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser(argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError, NotADirectoryError, UsageError, AnalyzerUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _build_parser(argv: list[str]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metamorph",
        description="Apply semantic-preserving method transformations and "
        "measure analyzer prediction changes.",
    )
    defaults = _config_defaults(argv)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *names: str) -> None:
        if "seed" in names:
            p.add_argument("--seed", type=int, default=defaults.get("seed", 42))
        if "kinds" in names:
            p.add_argument(
                "--kinds",
                default=defaults.get("kinds", ",".join(k.value for k in ALL_KINDS)),
                help="comma-separated subset of VN,BX,LX,SF,PS,TC,UN",
            )
        if "mode" in names:
            p.add_argument(
                "--mode", choices=(MODE_SINGLE, MODE_ALL), default=defaults.get("mode", MODE_SINGLE)
            )
        if "workers" in names:
            p.add_argument(
                "--workers", type=int, default=defaults.get("workers", os.cpu_count() or 1)
            )
        if "analyzer" in names:
            p.add_argument(
                "--analyzer",
                default=defaults.get("analyzer", "builtin"),
                help='"builtin" or "cmd:<command line>"',
            )
        if "edges" in names:
            p.add_argument(
                "--edges",
                default=defaults.get("edges", ",".join(str(e) for e in DEFAULT_BUCKET_EDGES)),
                help="comma-separated length-bucket edges",
            )
        p.add_argument("--config", help="JSON config file; flags override it")

    p = sub.add_parser("gen-corpus", help="generate a seeded corpus of method files")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-stmts", type=int, default=defaults.get("max_stmts", 64))
    common(p, "seed")
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("transform", help="apply transformations, write variants + manifest")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--relaxed-calls", action="store_true", default=defaults.get("relaxed_calls", False))
    p.add_argument("--self-check", action="store_true", default=defaults.get("self_check", False))
    common(p, "seed", "kinds", "mode", "workers")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("predict", help="produce predictions for a directory of method files")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--timeout", type=float, default=defaults.get("timeout", 10.0))
    common(p, "analyzer")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="join predictions through the manifest into records + reports")
    p.add_argument("--manifest", required=True)
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--join-threshold",
        type=float,
        default=defaults.get("join_threshold", 0.0),
        help="tolerated fraction of variants with missing predictions",
    )
    common(p, "edges")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="recompute reports from a record log")
    p.add_argument("--records", required=True)
    p.add_argument(
        "--group",
        choices=("kind", "kind,mode", "buckets", "correctness"),
        default="kind,mode",
    )
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output file (default: stdout)")
    common(p, "edges")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("check-equivalence", help="differentially interpret two methods")
    p.add_argument("--original", required=True)
    p.add_argument("--variant", required=True)
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--skip-original-errors", action="store_true")
    common(p, "seed")
    p.set_defaults(func=cmd_check_equivalence)

    p = sub.add_parser("run-all", help="transform + predict + evaluate in one pass")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--relaxed-calls", action="store_true", default=defaults.get("relaxed_calls", False))
    p.add_argument("--self-check", action="store_true", default=defaults.get("self_check", False))
    p.add_argument("--timeout", type=float, default=defaults.get("timeout", 10.0))
    p.add_argument(
        "--join-threshold", type=float, default=defaults.get("join_threshold", 0.0)
    )
    common(p, "seed", "kinds", "mode", "workers", "analyzer", "edges")
    p.set_defaults(func=cmd_run_all)

    return parser


def _config_defaults(argv: list[str]) -> dict:
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            with open(argv[i + 1], "r", encoding="utf-8") as handle:
                return json.load(handle)
        if arg.startswith("--config="):
            with open(arg.split("=", 1)[1], "r", encoding="utf-8") as handle:
                return json.load(handle)
    return {}


def _parse_kinds(text: str) -> tuple[TransformKind, ...]:
    kinds = []
    for part in text.split(","):
        part = part.strip().upper()
        if not part:
            continue
        try:
            kinds.append(TransformKind(part))
        except ValueError:
            raise UsageError(f"unknown transformation kind {part!r}") from None
    return tuple(kinds)


def _parse_edges(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    return tuple(int(part) for part in text.split(","))


def _method_files(input_dir: str) -> list[FsPath]:
    root = FsPath(input_dir)
    if not root.is_dir():
        raise NotADirectoryError(f"input directory not found: {input_dir}")
    return sorted(p for p in root.iterdir() if p.suffix in _METHOD_SUFFIXES)


# ── gen-corpus ───────────────────────────────────────────────────


def cmd_gen_corpus(args) -> int:
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    methods = gen_corpus(args.count, args.seed, max_stmts=args.max_stmts)
    for i, method in enumerate(methods):
        (out / f"m{i:04d}.mlang").write_text(print_method(method), encoding="utf-8")
    coverage = corpus_coverage(methods)
    print(f"wrote {len(methods)} methods to {out}")
    for key, value in coverage.items():
        print(f"  {key}: {value:.0%}")
    return 0


# ── transform ────────────────────────────────────────────────────


def _transform_file(work: tuple) -> dict:
    """Per-file worker: parse, enumerate, apply; returns plain dicts."""
    file_text, file_name, mid, kinds, mode, seed, relaxed, self_check = work
    try:
        ast = parse(file_text)
    except ParseError as exc:
        return {"method": {"id": mid, "file": file_name, "status": "parse_error", "reason": str(exc)}}
    try:
        from .analysis import resolve_scopes

        resolve_scopes(ast)
    except DuplicateDeclaration as exc:
        return {
            "method": {"id": mid, "file": file_name, "status": "duplicate_declaration", "reason": str(exc)}
        }

    method_seed = derive_seed(seed, mid)
    sites_per_kind = {}
    variants = []
    defects = []
    mode_unsupported = []
    for kind in kinds:
        kind = TransformKind(kind)
        sites = enumerate_candidates(ast, kind, rng_seed=method_seed, relaxed_calls=relaxed)
        sites_per_kind[kind.value] = len(sites)
        try:
            produced = apply(ast, kind, mode, seed=method_seed, original_id=mid, relaxed_calls=relaxed)
        except ModeUnsupported:
            mode_unsupported.append(kind.value)
            continue
        for index, variant in enumerate(produced):
            suffix = "all" if mode == MODE_ALL else str(index)
            vid = f"{mid}.{kind.value}.{suffix}"
            entry = {
                "id": vid,
                "file": f"{vid}.mlang",
                "original": mid,
                "kind": kind.value,
                "mode": mode,
                "site_index": suffix,
                "sites": [s.to_json() for s in variant.sites],
            }
            if self_check:
                defects.extend(_self_check(ast, variant, vid, method_seed))
            variants.append((entry, variant.source))
    return {
        "method": {
            "id": mid,
            "file": file_name,
            "status": "ok",
            "name": ast.name,
            "stmt_count": statement_count(ast),
            "sites": sites_per_kind,
        },
        "variants": variants,
        "defects": defects,
        "mode_unsupported": mode_unsupported,
    }


def _self_check(ast, variant, vid: str, seed: int) -> list[dict]:
    defects = []
    try:
        reparsed = parse(variant.source)
        if not structural_eq(reparsed, variant.ast):
            defects.append({"variant": vid, "check": "reparse", "detail": "structural mismatch"})
    except ParseError as exc:
        defects.append({"variant": vid, "check": "reparse", "detail": str(exc)})
        return defects
    try:
        report = check_equivalence(
            ast,
            variant.ast,
            trials=16,
            seed=seed,
            skip_original_errors=variant.kind == TransformKind.TC,
        )
        if not report.equivalent:
            defects.append(
                {
                    "variant": vid,
                    "check": "equivalence",
                    "detail": json.dumps(report.disagreements[0].to_json()),
                }
            )
    except UnsupportedConstruct:
        pass  # not interpretable; nothing to judge
    return defects


def cmd_transform(args) -> int:
    config = RunConfig(
        input_dir=args.input,
        out_dir=args.out,
        kinds=_parse_kinds(args.kinds),
        mode=args.mode,
        seed=args.seed,
        analyzer="",
        edges=(),
        relaxed_calls=args.relaxed_calls,
        self_check=args.self_check,
        workers=max(1, args.workers),
    )
    files = _method_files(args.input)
    if not files:
        print(f"error: no method files in {args.input}", file=sys.stderr)
        return 2
    out = FsPath(args.out)
    variants_dir = out / "variants"
    variants_dir.mkdir(parents=True, exist_ok=True)

    work = [
        (
            path.read_text(encoding="utf-8"),
            path.name,
            path.stem,
            [k.value for k in config.kinds],
            config.mode,
            config.seed,
            config.relaxed_calls,
            config.self_check,
        )
        for path in files
    ]
    if config.workers > 1 and len(work) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_transform_file, work, chunksize=8))
    else:
        results = [_transform_file(item) for item in work]

    methods = []
    variant_entries = []
    defects = []
    mode_unsupported: set[str] = set()
    for result in results:
        methods.append(result["method"])
        for entry, source in result.get("variants", ()):
            (variants_dir / entry["file"]).write_text(source, encoding="utf-8")
            variant_entries.append(entry)
        defects.extend(result.get("defects", ()))
        mode_unsupported.update(result.get("mode_unsupported", ()))

    manifest = {
        "config": config.to_json(),
        "methods": methods,
        "variants": variant_entries,
        "mode_unsupported": sorted(mode_unsupported),
        "engine_defects": defects,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    ok = sum(1 for m in methods if m["status"] == "ok")
    print(
        f"transformed {ok}/{len(methods)} methods into {len(variant_entries)} variants "
        f"({out / 'manifest.json'})"
    )
    if defects:
        print(f"error: {len(defects)} self-check defect(s); see manifest", file=sys.stderr)
        return 1
    return 0


# ── predict ──────────────────────────────────────────────────────


def cmd_predict(args) -> int:
    files = _method_files(args.input)
    if not files:
        print(f"error: no method files in {args.input}", file=sys.stderr)
        return 2
    records = _predict_files(files, args.analyzer, args.timeout)
    out = FsPath(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(
                json.dumps(
                    {
                        "id": record.method_id,
                        "label": list(record.label.subtokens),
                        "raw": record.raw,
                        "flags": list(record.flags),
                    }
                )
                + "\n"
            )
    print(f"wrote {len(records)} predictions to {out}")
    return 0


def _predict_files(files: list[FsPath], analyzer: str, timeout: float):
    if analyzer == "builtin":
        records = []
        for path in files:
            try:
                ast = parse(path.read_text(encoding="utf-8"))
                records.append(builtin_predict(ast, method_id=path.stem))
            except ParseError:
                from .analyzer import PredictionRecord

                records.append(
                    PredictionRecord(path.stem, "builtin", error_label(), "", ("parse_error",))
                )
        return records
    if analyzer.startswith("cmd:"):
        batch = [(path.stem, path.read_text(encoding="utf-8")) for path in files]
        return external_predict(batch, analyzer[4:], timeout=timeout)
    raise UsageError(f"unknown analyzer spec {analyzer!r} (expected builtin or cmd:<path>)")


def _load_predictions(path: str) -> dict[str, Label]:
    predictions: dict[str, Label] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            data = json.loads(line)
            predictions[data["id"]] = Label(tuple(data["label"]))
    return predictions


# ── evaluate ─────────────────────────────────────────────────────


def cmd_evaluate(args) -> int:
    with open(args.manifest, "r", encoding="utf-8") as handle:
        manifest = json.load(handle)
    before = _load_predictions(args.before)
    after = _load_predictions(args.after)
    edges = _parse_edges(args.edges)
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)

    methods = {m["id"]: m for m in manifest["methods"] if m["status"] == "ok"}
    records: list[EvaluationRecord] = []
    join_errors = []
    for entry in manifest["variants"]:
        method = methods.get(entry["original"])
        if method is None:
            join_errors.append({"variant": entry["id"], "missing": "method"})
            continue
        missing = []
        if entry["original"] not in before:
            missing.append("before")
        if entry["id"] not in after:
            missing.append("after")
        if missing:
            join_errors.append({"variant": entry["id"], "missing": ",".join(missing)})
            continue
        try:
            truth = normalize_label(method["name"])
        except EmptyLabel:
            truth = error_label()
        records.append(
            EvaluationRecord.build(
                method_id=entry["original"],
                kind=entry["kind"],
                mode=entry["mode"],
                truth=truth,
                before=before[entry["original"]],
                after=after[entry["id"]],
                stmt_count=method["stmt_count"],
            )
        )

    write_records(records, out / "records.jsonl")
    _write_report(compute_metrics(records, ("kind", "mode")), out, "report")
    _write_report(bucket_by_length(records, edges), out, "report_buckets")
    _write_report(split_by_correctness(records), out, "report_correctness")
    if join_errors:
        (out / "join_errors.json").write_text(
            json.dumps(join_errors, indent=2) + "\n", encoding="utf-8"
        )
    total = len(manifest["variants"])
    print(f"evaluated {len(records)}/{total} variants -> {out}")
    if total and len(join_errors) / total > args.join_threshold:
        print(
            f"error: {len(join_errors)} variants lacked predictions "
            f"(threshold {args.join_threshold})",
            file=sys.stderr,
        )
        return 2
    return 0


def _write_report(report, out: FsPath, stem: str) -> None:
    (out / f"{stem}.json").write_text(
        json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8"
    )
    (out / f"{stem}.csv").write_text(report.to_csv(), encoding="utf-8")


# ── report ───────────────────────────────────────────────────────


def cmd_report(args) -> int:
    records = read_records(args.records)
    if args.group == "buckets":
        report = bucket_by_length(records, _parse_edges(args.edges))
    elif args.group == "correctness":
        report = split_by_correctness(records)
    else:
        report = compute_metrics(records, tuple(args.group.split(",")))
    text = (
        json.dumps(report.to_json(), indent=2) + "\n" if args.format == "json" else report.to_csv()
    )
    if args.out:
        FsPath(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return 0


# ── check-equivalence ────────────────────────────────────────────


def cmd_check_equivalence(args) -> int:
    original = parse(FsPath(args.original).read_text(encoding="utf-8"))
    variant = parse(FsPath(args.variant).read_text(encoding="utf-8"))
    try:
        report = check_equivalence(
            original,
            variant,
            trials=args.trials,
            seed=args.seed,
            step_budget=args.budget,
            skip_original_errors=args.skip_original_errors,
        )
    except UnsupportedConstruct as exc:
        print(json.dumps({"equivalent": None, "error": str(exc)}, indent=2))
        return 2
    print(json.dumps(report.to_json(), indent=2))
    return 0 if report.equivalent else 1


# ── run-all ──────────────────────────────────────────────────────


def cmd_run_all(args) -> int:
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    status = cmd_transform(_ns(args, out=str(out)))
    if status not in (0, 1):
        return status
    transform_status = status

    files = _method_files(args.input)
    before = _predict_files(files, args.analyzer, args.timeout)
    variant_files = _method_files(out / "variants") if (out / "variants").is_dir() else []
    after = _predict_files(variant_files, args.analyzer, args.timeout)
    for name, records in (("predictions_before.jsonl", before), ("predictions_after.jsonl", after)):
        with (out / name).open("w", encoding="utf-8") as handle:
            for record in records:
                handle.write(
                    json.dumps(
                        {
                            "id": record.method_id,
                            "label": list(record.label.subtokens),
                            "raw": record.raw,
                            "flags": list(record.flags),
                        }
                    )
                    + "\n"
                )

    status = cmd_evaluate(
        _ns(
            args,
            manifest=str(out / "manifest.json"),
            before=str(out / "predictions_before.jsonl"),
            after=str(out / "predictions_after.jsonl"),
            out=str(out),
        )
    )
    if status != 0:
        return status
    meta = {
        "tool": "metamorph",
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return transform_status


def _ns(args, **overrides) -> argparse.Namespace:
    data = vars(args).copy()
    data.update(overrides)
    return argparse.Namespace(**data)


if __name__ == "__main__":
    sys.exit(main())
