"""lexigen: batch-prompt a text-completion provider over a lemma list to
build a monolingual dictionary, then evaluate the generated definitions
against a reference dictionary (lexical overlap, edit distance, embedding
cosine, sense matching, and an error taxonomy)."""

from .lexicon import (
    GeneratedDefinition,
    Lemma,
    LemmaList,
    LexigenError,
    ParseError,
    PosTag,
    ReferenceEntry,
    load_dictionary,
    load_lemma_list,
    load_reference_dictionary,
    parse_lemma_list,
    save_dictionary,
)
from .prompts import (
    AlignmentError,
    Batch,
    BatchConfig,
    CostEstimate,
    PromptTemplate,
    ThroughputRow,
    build_prompt,
    estimate_cost,
    parse_batch_completion,
    plan_batches,
)
from .textmetrics import (
    LengthStats,
    MetricScores,
    bleu_corpus,
    cosine,
    jaccard,
    length_stats,
    levenshtein,
    tokenize,
)

__all__ = [
    "AlignmentError",
    "Batch",
    "BatchConfig",
    "CostEstimate",
    "GeneratedDefinition",
    "Lemma",
    "LemmaList",
    "LengthStats",
    "LexigenError",
    "MetricScores",
    "ParseError",
    "PosTag",
    "PromptTemplate",
    "ReferenceEntry",
    "ThroughputRow",
    "bleu_corpus",
    "build_prompt",
    "cosine",
    "estimate_cost",
    "jaccard",
    "length_stats",
    "levenshtein",
    "load_dictionary",
    "load_lemma_list",
    "load_reference_dictionary",
    "parse_batch_completion",
    "parse_lemma_list",
    "plan_batches",
    "save_dictionary",
    "tokenize",
]

__version__ = "0.1.0"
