"""metamorph: semantic-preserving method transformations and a
metamorphic evaluation harness for method-name predictors."""

from .analysis import (
    ALL_KINDS,
    ALL_PLACE_KINDS,
    CandidateSite,
    DuplicateDeclaration,
    RwSet,
    ScopeInfo,
    TransformKind,
    derive_seed,
    enumerate_candidates,
    resolve_scopes,
    rw_set,
)
from .analyzer import (
    AnalyzerUnavailable,
    EmptyLabel,
    Label,
    PredictionRecord,
    builtin_predict,
    external_predict,
    normalize_label,
)
from .evaluation import (
    EvaluationRecord,
    MetricsCell,
    MetricsReport,
    OutcomeCategory,
    bucket_by_length,
    classify_outcome,
    compute_metrics,
    split_by_correctness,
)
from .generator import corpus_coverage, gen_corpus, gen_method
from .interp import (
    EquivalenceReport,
    ExecOutcome,
    UnsupportedConstruct,
    check_equivalence,
    interpret,
)
from .lexer import ParseError
from .nodes import MethodAst, node_count, statement_count, structural_eq
from .parser import parse
from .printer import print_method
from .transforms import (
    MODE_ALL,
    MODE_SINGLE,
    ModeUnsupported,
    TransformedVariant,
    apply,
    boolean_exchange,
    loop_exchange,
    permute_statement,
    switch_to_if,
    try_catch_insertion,
    unused_statement_insertion,
    variable_renaming,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_KINDS",
    "ALL_PLACE_KINDS",
    "AnalyzerUnavailable",
    "CandidateSite",
    "DuplicateDeclaration",
    "EmptyLabel",
    "EquivalenceReport",
    "EvaluationRecord",
    "ExecOutcome",
    "Label",
    "MethodAst",
    "MetricsCell",
    "MetricsReport",
    "MODE_ALL",
    "MODE_SINGLE",
    "ModeUnsupported",
    "OutcomeCategory",
    "ParseError",
    "PredictionRecord",
    "RwSet",
    "ScopeInfo",
    "TransformKind",
    "TransformedVariant",
    "UnsupportedConstruct",
    "apply",
    "boolean_exchange",
    "bucket_by_length",
    "builtin_predict",
    "check_equivalence",
    "classify_outcome",
    "compute_metrics",
    "corpus_coverage",
    "derive_seed",
    "enumerate_candidates",
    "external_predict",
    "gen_corpus",
    "gen_method",
    "interpret",
    "loop_exchange",
    "node_count",
    "normalize_label",
    "parse",
    "permute_statement",
    "print_method",
    "resolve_scopes",
    "rw_set",
    "split_by_correctness",
    "statement_count",
    "structural_eq",
    "switch_to_if",
    "try_catch_insertion",
    "unused_statement_insertion",
    "variable_renaming",
]
