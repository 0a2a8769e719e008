"""Closed-class grammatical error correction by multi-order pseudo-perplexity."""

import json as _json

from ._pplgec import (  # noqa: F401
    BackendUnavailable,
    ConfusionRegistry,
    DataError,
    Error,
    MlmOracle,
    NGramOracle,
    RemoteOracle,
    ScoreBreakdown,
    UniformOracle,
    build_corpus,
    correct,
    correct_sentence,
    f_beta,
    first_order_score,
    fused_score,
    hit_at_k,
    recommend_topk,
    run_cli,
    score_variant,
    second_order_score,
    tokenize,
)
from . import _pplgec


def evaluate(corpus_text, registry, oracle, alpha=None, mode="fused", jobs=0):
    """Metrics report for a TSV corpus, as a dict keyed like the CLI's JSON."""
    return _json.loads(_pplgec._evaluate_json(corpus_text, registry, oracle, alpha, mode, jobs))


def tune_alpha(corpus_text, registry, oracle):
    """Per-type best alpha on the 0.00..1.00 grid, with the full curves."""
    return _json.loads(_pplgec._tune_alpha_json(corpus_text, registry, oracle))
