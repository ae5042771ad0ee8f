"""Heuristic classifiers for the recurring failure shapes of generated
definitions, plus corpus-level error statistics.

Only mechanically checkable categories are detected: circular openings,
noun-defined-as-verb, English leaking into the definition, degenerate
one-token outputs, and (in prompt-audit mode) templates that fail to quote
the lemma. Judgement calls like "related but wrong" are out of scope.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .lexicon import GeneratedDefinition, Lemma, PosTag
from .prompts import PromptTemplate
from .textmetrics import tokenize

_ARTICLES = {"el", "la", "los", "las", "un", "una"}
_COPULAS = (("es",), ("son",), ("se", "refiere"))
_VERB_MARKER = ("es", "un", "verbo")

DEFAULT_SPANISH_THRESHOLD = 0.05
DEFAULT_ENGLISH_THRESHOLD = 0.2


class ErrorLabel(enum.Enum):
    CIRCULAR_DEFINITION = "circular_definition"
    TOKENIZER_ARTIFACT = "tokenizer_artifact"
    NOUN_AS_VERB = "noun_as_verb"
    LANGUAGE_INTERFERENCE = "language_interference"
    DEGENERATE = "degenerate"


@lru_cache(maxsize=None)
def _word_list(name: str) -> frozenset[str]:
    text = resources.files("lexigen").joinpath(f"data/{name}").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


def spanish_function_words() -> frozenset[str]:
    return _word_list("function_words_es.txt")


def english_common_words() -> frozenset[str]:
    return _word_list("common_words_en.txt")


def _starts_with(tokens: Sequence[str], prefix: Sequence[str]) -> bool:
    return len(tokens) >= len(prefix) and tuple(tokens[: len(prefix)]) == tuple(prefix)


def _contains_run(tokens: Sequence[str], run: Sequence[str]) -> bool:
    span = len(run)
    return any(tuple(tokens[i : i + span]) == tuple(run) for i in range(len(tokens) - span + 1))


def _is_circular(lemma_tokens: Sequence[str], tokens: Sequence[str]) -> bool:
    if not lemma_tokens or not tokens:
        return False
    if _starts_with(tokens, lemma_tokens):
        return True
    if tokens[0] in _ARTICLES and _starts_with(tokens[1:], lemma_tokens):
        rest = tokens[1 + len(lemma_tokens):]
        return any(_starts_with(rest, copula) for copula in _COPULAS)
    return False


def classify(
    lemma: Lemma,
    definition: str,
    template: PromptTemplate | None = None,
    spanish_threshold: float = DEFAULT_SPANISH_THRESHOLD,
    english_threshold: float = DEFAULT_ENGLISH_THRESHOLD,
) -> frozenset[ErrorLabel]:
    """Apply every detector to one definition; a definition may carry several
    labels and the empty set means clean.

    All matching happens on tokenized (NFC, lowercased) text. Passing the
    generation ``template`` enables prompt-audit mode, which additionally
    flags runs whose template does not quote the lemma.
    """
    labels = set()
    lemma_tokens = tokenize(lemma.surface)
    tokens = tokenize(definition)

    if _is_circular(lemma_tokens, tokens):
        labels.add(ErrorLabel.CIRCULAR_DEFINITION)

    if lemma.pos is PosTag.NOUN:
        if (
            _starts_with(tokens, ("verbo",))
            or _starts_with(tokens, ("el", "verbo"))
            or _contains_run(tokens, _VERB_MARKER)
        ):
            labels.add(ErrorLabel.NOUN_AS_VERB)

    if tokens:
        spanish = sum(1 for token in tokens if token in spanish_function_words())
        english = sum(1 for token in tokens if token in english_common_words())
        if spanish / len(tokens) < spanish_threshold and english / len(tokens) >= english_threshold:
            labels.add(ErrorLabel.LANGUAGE_INTERFERENCE)

    if tokens and (tuple(tokens) == tuple(lemma_tokens) or len(tokens) == 1):
        labels.add(ErrorLabel.DEGENERATE)

    if template is not None and not template.quotes_lemma:
        labels.add(ErrorLabel.TOKENIZER_ARTIFACT)

    return frozenset(labels)


@dataclass(frozen=True)
class ErrorStats:
    total: int
    per_label: dict[ErrorLabel, tuple[int, float]]

    def count(self, label: ErrorLabel) -> int:
        return self.per_label[label][0]

    def fraction(self, label: ErrorLabel) -> float:
        return self.per_label[label][1]


def summarize(labeled: Iterable[tuple[Lemma, frozenset[ErrorLabel]]]) -> ErrorStats:
    """Per-label counts and fractions over all classified definitions."""
    items = list(labeled)
    total = len(items)
    per_label = {}
    for label in ErrorLabel:
        count = sum(1 for _lemma, labels in items if label in labels)
        per_label[label] = (count, count / total if total else 0.0)
    return ErrorStats(total=total, per_label=per_label)


def classify_dictionary(
    records: Sequence[GeneratedDefinition],
    template: PromptTemplate | None = None,
    spanish_threshold: float = DEFAULT_SPANISH_THRESHOLD,
    english_threshold: float = DEFAULT_ENGLISH_THRESHOLD,
) -> list[tuple[GeneratedDefinition, frozenset[ErrorLabel]]]:
    return [
        (
            record,
            classify(
                record.lemma,
                record.text,
                template=template,
                spanish_threshold=spanish_threshold,
                english_threshold=english_threshold,
            ),
        )
        for record in records
    ]


def stats_to_json(stats: ErrorStats) -> dict:
    return {
        "total": stats.total,
        "per_label": {
            label.value: {"count": count, "fraction": fraction}
            for label, (count, fraction) in stats.per_label.items()
        },
    }
