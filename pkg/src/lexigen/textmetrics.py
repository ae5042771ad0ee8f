"""Pure text-similarity metrics: tokenization, corpus BLEU, Levenshtein,
Jaccard, cosine, and definition-length statistics.

All functions are deterministic and side-effect free. BLEU is corpus-level
(clipped n-gram counts pooled over all pairs before precisions) with no
smoothing; Levenshtein is an unnormalized character-level edit distance.
"""

from __future__ import annotations

import math
import statistics
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .lexicon import LexigenError, nfc

TokenSequence = tuple[str, ...]


@dataclass(frozen=True)
class MetricScores:
    bleu_cumulative: float
    bleu_1gram: float
    levenshtein: float
    jaccard: float
    cosine: float


@dataclass(frozen=True)
class LengthStats:
    mean_words: float
    sd_words: float
    mean_chars: float
    sd_chars: float


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> TokenSequence:
    """NFC-normalize, lowercase, split on whitespace, strip surrounding
    punctuation per token, drop emptied tokens. Diacritics are preserved."""
    tokens = []
    for raw in nfc(text).lower().split():
        token = _strip_punctuation(raw)
        if token:
            tokens.append(token)
    return tuple(tokens)


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_corpus(
    pairs: Sequence[tuple[Sequence[str], Sequence[str]]],
    max_n: int = 4,
    weights: Sequence[float] | None = None,
) -> float:
    """Corpus-level BLEU over (candidate, reference) token-sequence pairs.

    Clipped n-gram matches and candidate totals are summed over all pairs
    before computing precisions; score = BP * exp(sum w_i log p_i) with no
    smoothing (any zero precision gives 0). BP = min(1, exp(1 - r/c)) with
    pooled reference length r and candidate length c. A corpus with total
    candidate length 0 scores 0.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if weights is None:
        weights = [1.0 / max_n] * max_n
    if len(weights) != max_n:
        raise ValueError("need exactly one weight per n-gram order")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    if not pairs:
        raise ValueError("candidate corpus is empty")

    matches = [0] * max_n
    totals = [0] * max_n
    cand_len = 0
    ref_len = 0
    for candidate, reference in pairs:
        cand_len += len(candidate)
        ref_len += len(reference)
        for n in range(1, max_n + 1):
            cand_counts = _ngram_counts(candidate, n)
            ref_counts = _ngram_counts(reference, n)
            totals[n - 1] += sum(cand_counts.values())
            matches[n - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in cand_counts.items()
            )

    if cand_len == 0:
        return 0.0
    log_sum = 0.0
    for weight, match, total in zip(weights, matches, totals):
        if match == 0 or total == 0:
            return 0.0
        log_sum += weight * math.log(match / total)
    brevity = min(1.0, math.exp(1.0 - ref_len / cand_len))
    return brevity * math.exp(log_sum)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over Unicode scalar values of NFC-normalized
    inputs; no case folding."""
    a, b = nfc(a), nfc(b)
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, char_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, char_b in enumerate(b, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (char_a != char_b),
            )
        previous = current
    return previous[-1]


def jaccard(a: Sequence[str], b: Sequence[str]) -> float:
    """Intersection-over-union of the two token sets; both empty -> 1.0."""
    set_a, set_b = set(a), set(b)
    if not set_a and not set_b:
        return 1.0
    return len(set_a & set_b) / len(set_a | set_b)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity clamped to [-1, 1] against floating-point drift."""
    if len(u) != len(v):
        raise LexigenError(f"dimension mismatch: {len(u)} vs {len(v)}")
    dot = math.fsum(x * y for x, y in zip(u, v))
    norm_u = math.sqrt(math.fsum(x * x for x in u))
    norm_v = math.sqrt(math.fsum(y * y for y in v))
    if norm_u == 0.0 or norm_v == 0.0:
        raise LexigenError("cosine undefined for zero-norm vector")
    return max(-1.0, min(1.0, dot / (norm_u * norm_v)))


def length_stats(texts: Sequence[str]) -> LengthStats:
    """Mean and population standard deviation of token and character counts.
    Characters are counted on the raw string, words on the token sequence."""
    if not texts:
        raise ValueError("length_stats needs at least one text")
    word_counts = [len(tokenize(text)) for text in texts]
    char_counts = [len(text) for text in texts]
    return LengthStats(
        mean_words=statistics.fmean(word_counts),
        sd_words=statistics.pstdev(word_counts),
        mean_chars=statistics.fmean(char_counts),
        sd_chars=statistics.pstdev(char_counts),
    )
