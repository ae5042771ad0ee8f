"""Prompt templates, batch planning, batched-completion parsing, and the
cost/throughput model.

Batched prompts use a rigid decimal-numbered list of double-quoted lemmas
('1. "casa"'), which is what makes parsing the completion back into
per-lemma definitions deterministic.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .lexicon import GeneratedDefinition, Lemma, LemmaList, LexigenError, ParseError

PLACEHOLDER = "[word]"


class AlignmentError(LexigenError):
    """A batched completion could not be aligned with its batch; ``missing``
    holds the 1-based slot indices to retry as single-lemma prompts and
    ``partial`` the slot texts that were salvaged."""

    def __init__(self, missing: Sequence[int], partial: dict[int, str] | None = None):
        self.missing = sorted(missing)
        self.partial = dict(partial or {})
        super().__init__(f"could not align completion slots {self.missing}")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str
    batched: bool = False
    numbering_style: str = "{k}. "

    def __post_init__(self):
        if self.body.count(PLACEHOLDER) != 1:
            raise ValueError(f"template body must contain exactly one {PLACEHOLDER!r}")

    @property
    def quotes_lemma(self) -> bool:
        """Whether substituted lemmas end up inside double quotes (batched
        slots always quote; single templates must quote the placeholder)."""
        return self.batched or f'"{PLACEHOLDER}"' in self.body


TEMPLATES: dict[str, PromptTemplate] = {
    template.id: template
    for template in [
        PromptTemplate(
            id="literal-es",
            body=f'Genera en español la definición para la palabra literal "{PLACEHOLDER}"',
        ),
        PromptTemplate(
            id="literal-es-batch",
            body=(
                "Genera en español la definición para cada una de las siguientes "
                f"palabras literales:\n{PLACEHOLDER}"
            ),
            batched=True,
        ),
        PromptTemplate(
            id="define-en",
            body=f'Generate in Spanish a definition of the word "{PLACEHOLDER}"',
        ),
        PromptTemplate(
            id="define-en-batch",
            body=(
                "Generate in Spanish a definition of each of the following "
                f"words:\n{PLACEHOLDER}"
            ),
            batched=True,
        ),
    ]
}

DEFAULT_TEMPLATE_ID = "literal-es"


def get_template(template_id: str, batched: bool = False) -> PromptTemplate:
    """Look up a template; with ``batched=True`` resolve the '-batch' variant
    of a single-lemma id."""
    if batched and template_id in TEMPLATES and not TEMPLATES[template_id].batched:
        batch_id = f"{template_id}-batch"
        if batch_id in TEMPLATES:
            template_id = batch_id
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise LexigenError(f"unknown prompt template {template_id!r}") from None


def single_variant(template: PromptTemplate) -> PromptTemplate:
    """The single-lemma counterpart used to retry misaligned batch slots."""
    if not template.batched:
        return template
    base_id = template.id.removesuffix("-batch")
    if base_id in TEMPLATES and not TEMPLATES[base_id].batched:
        return TEMPLATES[base_id]
    return TEMPLATES[DEFAULT_TEMPLATE_ID]


def _quoted(lemma: Lemma) -> str:
    return '"' + lemma.surface.replace('"', '\\"') + '"'


def build_prompt(lemmas: Sequence[Lemma], template: PromptTemplate) -> str:
    """Substitute lemmas into the template. Single templates take exactly one
    lemma; batched templates render one numbered, quoted slot per lemma."""
    if not lemmas:
        raise LexigenError("build_prompt needs at least one lemma")
    if not template.batched:
        if len(lemmas) != 1:
            raise LexigenError(
                f"template {template.id!r} is single-lemma but got {len(lemmas)} lemmas"
            )
        surface = lemmas[0].surface.replace('"', '\\"')
        return template.body.replace(PLACEHOLDER, surface)
    slots = "\n".join(
        template.numbering_style.format(k=k) + _quoted(lemma)
        for k, lemma in enumerate(lemmas, start=1)
    )
    return template.body.replace(PLACEHOLDER, slots)


@dataclass(frozen=True)
class BatchConfig:
    match_size: int = 1
    max_tokens: int = 100
    temperature: float = 0.5
    price_per_1k_tokens_eur: float = 0.02

    def __post_init__(self):
        if self.match_size < 1:
            raise ValueError("match_size must be >= 1")
        if self.max_tokens < 16:
            raise ValueError("max_tokens must be >= 16")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.price_per_1k_tokens_eur < 0:
            raise ValueError("price_per_1k_tokens_eur must be >= 0")


@dataclass(frozen=True)
class Batch:
    batch_id: int
    lemmas: tuple[Lemma, ...]
    prompt_text: str
    template_id: str


def plan_batches(
    lemmas: LemmaList | Sequence[Lemma],
    config: BatchConfig,
    template: PromptTemplate,
) -> list[Batch]:
    """Split the lemma list into ceil(n / match_size) batches, input order
    preserved; all but possibly the last have exactly match_size lemmas."""
    items = tuple(lemmas)
    batches = []
    for batch_id, start in enumerate(range(0, len(items), config.match_size)):
        chunk = items[start : start + config.match_size]
        batches.append(
            Batch(
                batch_id=batch_id,
                lemmas=chunk,
                prompt_text=build_prompt(chunk, template),
                template_id=template.id,
            )
        )
    return batches


_MARKER_RE = re.compile(r"^\s*(\d+)\.\s", re.MULTILINE)


def split_numbered_completion(completion_text: str, n: int) -> list[str]:
    """Split a completion on its 'k. ' line markers into exactly n trimmed
    segments. Raises AlignmentError when markers are missing, out of order,
    or any segment is empty; the error lists the unmatched 1-based indices
    and carries whatever slots could still be salvaged.

    Markers must be strictly increasing values in 1..n; a line marker that
    breaks the order (stray, duplicate, out of range) cannot be trusted and
    poisons the slot whose segment contains it.
    """
    accepted: list[tuple[int, int, int]] = []  # (slot, text_start, marker_start)
    strays: list[int] = []  # positions of untrusted markers
    last = 0
    for match in _MARKER_RE.finditer(completion_text):
        value = int(match.group(1))
        if last < value <= n:
            accepted.append((value, match.end(), match.start()))
            last = value
        else:
            strays.append(match.start())
    segments: dict[int, str] = {}
    spans: dict[int, tuple[int, int]] = {}
    for i, (slot, text_start, _marker_start) in enumerate(accepted):
        text_end = accepted[i + 1][2] if i + 1 < len(accepted) else len(completion_text)
        segments[slot] = completion_text[text_start:text_end].strip()
        spans[slot] = (text_start, text_end)
    poisoned = {
        slot
        for slot, (start, end) in spans.items()
        if any(start <= pos < end for pos in strays)
    }
    missing = [k for k in range(1, n + 1) if k in poisoned or not segments.get(k)]
    if missing:
        partial = {k: text for k, text in segments.items() if k not in missing and text}
        raise AlignmentError(missing, partial)
    return [segments[k] for k in range(1, n + 1)]


def strip_lemma_echo(text: str, lemma: Lemma) -> str:
    """Drop a leading '"lemma":' echo (quoted or bare) from a slot text; the
    numbered answer format repeats the quoted lemma before the definition."""
    for candidate in (_quoted(lemma), lemma.surface):
        if text.startswith(candidate):
            rest = text[len(candidate):]
            if rest.lstrip().startswith(":"):
                return rest.lstrip()[1:].strip()
    return text


def parse_batch_completion(
    completion_text: str,
    batch: Batch,
    tokens_prompt: int = 0,
    tokens_completion: int = 0,
    cost_eur: float = 0.0,
) -> list[GeneratedDefinition]:
    """Parse a batched completion into one GeneratedDefinition per lemma,
    k-th segment assigned to the k-th lemma (lemma echoes stripped).
    Request-level token counts are apportioned as evenly as possible across
    records and the cost is split equally; raises AlignmentError (with the
    retryable indices) when the completion cannot be aligned.
    """
    n = len(batch.lemmas)
    texts = split_numbered_completion(completion_text, n)
    stripped = [strip_lemma_echo(text, lemma) for lemma, text in zip(batch.lemmas, texts)]
    empty = [k for k, text in enumerate(stripped, start=1) if not text]
    if empty:
        partial = {k: text for k, text in enumerate(stripped, start=1) if text}
        raise AlignmentError(empty, partial)
    records = []
    for k, (lemma, text) in enumerate(zip(batch.lemmas, stripped)):
        records.append(
            GeneratedDefinition(
                lemma=lemma,
                text=text,
                prompt_id=batch.template_id,
                batch_id=batch.batch_id,
                tokens_prompt=apportion(tokens_prompt, n, k),
                tokens_completion=apportion(tokens_completion, n, k),
                cost_eur=cost_eur / n,
            )
        )
    return records


def apportion(total: int, n: int, k: int) -> int:
    """Even split of a request-level count: slot k's share of total over n."""
    base, remainder = divmod(total, n)
    return base + (1 if k < remainder else 0)


@dataclass(frozen=True)
class ThroughputRow:
    """One measured batching run: lemmas processed in half an hour and what
    that half hour cost."""

    match_size: int
    max_tokens: int
    processed_per_half_hour: int
    price_per_half_hour_eur: float


# Measured half-hour runs for batch sizes 1/3/5/10 (largest batch is the
# cheapest per lemma and what full runs use by default).
DEFAULT_THROUGHPUT_PRESETS: tuple[ThroughputRow, ...] = (
    ThroughputRow(1, 100, 400, 0.60),
    ThroughputRow(3, 500, 1179, 0.78),
    ThroughputRow(5, 1000, 1290, 0.84),
    ThroughputRow(10, 2000, 1650, 0.90),
)


def load_throughput_presets(path: str | Path) -> tuple[ThroughputRow, ...]:
    """Load preset rows from a JSON-lines file of
    {match_size, max_tokens, processed_per_half_hour, price_per_half_hour_eur}."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rows.append(
                    ThroughputRow(
                        match_size=int(obj["match_size"]),
                        max_tokens=int(obj["max_tokens"]),
                        processed_per_half_hour=int(obj["processed_per_half_hour"]),
                        price_per_half_hour_eur=float(obj["price_per_half_hour_eur"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad preset row: {exc}", line_no) from exc
    if not rows:
        raise LexigenError(f"preset file {path} has no rows")
    return tuple(rows)


def preset_for_match_size(
    match_size: int, presets: Sequence[ThroughputRow] = DEFAULT_THROUGHPUT_PRESETS
) -> ThroughputRow:
    for row in presets:
        if row.match_size == match_size:
            return row
    raise LexigenError(f"no throughput preset for match size {match_size}")


@dataclass(frozen=True)
class CostEstimate:
    n_lemmas: int
    total_eur: float
    cents_per_lemma: float
    est_wall_hours: float


def estimate_cost(n_lemmas: int, row: ThroughputRow) -> CostEstimate:
    """Project a run's cost from a measured throughput row:
    cents/lemma = price / processed * 100, scaled linearly to n_lemmas."""
    if row.processed_per_half_hour <= 0:
        raise LexigenError("throughput row has zero processed lemmas")
    if n_lemmas < 0:
        raise ValueError("n_lemmas must be >= 0")
    cents_per_lemma = row.price_per_half_hour_eur / row.processed_per_half_hour * 100.0
    return CostEstimate(
        n_lemmas=n_lemmas,
        total_eur=n_lemmas * cents_per_lemma / 100.0,
        cents_per_lemma=cents_per_lemma,
        est_wall_hours=n_lemmas / row.processed_per_half_hour * 0.5,
    )
