"""End-to-end definition generation: plan batches, submit prompts through a
completion provider, parse the answers back, and repair misaligned batch
slots with bounded single-lemma retries.

Batches run on a bounded worker pool but results are reassembled in batch
order, so output only depends on (seed, input), never on scheduling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .lexicon import GeneratedDefinition, Lemma
from .prompts import (
    AlignmentError,
    Batch,
    BatchConfig,
    PromptTemplate,
    build_prompt,
    parse_batch_completion,
    plan_batches,
    single_variant,
    strip_lemma_echo,
    apportion,
)
from .providers import CompletionProvider, CompletionRequest, ProviderError

logger = logging.getLogger(__name__)

MAX_SINGLE_RETRIES = 2


@dataclass
class GenerationSummary:
    records: list[GeneratedDefinition] = field(default_factory=list)
    generated: int = 0
    skipped: int = 0
    retried: int = 0
    failed: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)
    terminal_error: str | None = None

    @property
    def ok(self) -> bool:
        return self.terminal_error is None


def _request_cost(tokens_prompt: int, tokens_completion: int, config: BatchConfig) -> float:
    return (tokens_prompt + tokens_completion) / 1000.0 * config.price_per_1k_tokens_eur


def _complete_single(
    lemma: Lemma,
    template: PromptTemplate,
    config: BatchConfig,
    provider: CompletionProvider,
    batch_id: int,
) -> GeneratedDefinition | None:
    """Ask for one lemma on its own, retrying a bounded number of times when
    the answer comes back empty."""
    single = single_variant(template)
    prompt = build_prompt([lemma], single)
    for _attempt in range(MAX_SINGLE_RETRIES):
        result = provider.complete(
            CompletionRequest(prompt, config.max_tokens, config.temperature)
        )
        text = strip_lemma_echo(result.text.strip(), lemma)
        if text:
            return GeneratedDefinition(
                lemma=lemma,
                text=text,
                prompt_id=single.id,
                batch_id=batch_id,
                tokens_prompt=result.tokens_prompt,
                tokens_completion=result.tokens_completion,
                cost_eur=_request_cost(result.tokens_prompt, result.tokens_completion, config),
            )
    return None


def _run_batch(
    batch: Batch,
    template: PromptTemplate,
    config: BatchConfig,
    provider: CompletionProvider,
) -> tuple[list[GeneratedDefinition], int, list[str]]:
    """Returns (records in slot order, retry count, failed surfaces)."""
    result = provider.complete(
        CompletionRequest(batch.prompt_text, config.max_tokens, config.temperature)
    )
    cost = _request_cost(result.tokens_prompt, result.tokens_completion, config)

    if not template.batched:
        lemma = batch.lemmas[0]
        text = strip_lemma_echo(result.text.strip(), lemma)
        if text:
            record = GeneratedDefinition(
                lemma=lemma,
                text=text,
                prompt_id=batch.template_id,
                batch_id=batch.batch_id,
                tokens_prompt=result.tokens_prompt,
                tokens_completion=result.tokens_completion,
                cost_eur=cost,
            )
            return [record], 0, []
        retried = _complete_single(lemma, template, config, provider, batch.batch_id)
        if retried is not None:
            return [retried], 1, []
        return [], 1, [lemma.surface]

    try:
        records = parse_batch_completion(
            result.text, batch, result.tokens_prompt, result.tokens_completion, cost
        )
        return records, 0, []
    except AlignmentError as exc:
        logger.warning(
            "batch %d misaligned, retrying slots %s singly", batch.batch_id, exc.missing
        )
        n = len(batch.lemmas)
        by_slot: dict[int, GeneratedDefinition] = {}
        for slot, text in exc.partial.items():
            lemma = batch.lemmas[slot - 1]
            text = strip_lemma_echo(text, lemma)
            if not text:
                continue
            by_slot[slot] = GeneratedDefinition(
                lemma=lemma,
                text=text,
                prompt_id=batch.template_id,
                batch_id=batch.batch_id,
                tokens_prompt=apportion(result.tokens_prompt, n, slot - 1),
                tokens_completion=apportion(result.tokens_completion, n, slot - 1),
                cost_eur=cost / n,
            )
        retried = 0
        failed: list[str] = []
        for slot in range(1, n + 1):
            if slot in by_slot:
                continue
            lemma = batch.lemmas[slot - 1]
            retried += 1
            record = _complete_single(lemma, template, config, provider, batch.batch_id)
            if record is not None:
                by_slot[slot] = record
            else:
                failed.append(lemma.surface)
        records = [by_slot[slot] for slot in sorted(by_slot)]
        return records, retried, failed


def generate_definitions(
    lemmas: Sequence[Lemma],
    template: PromptTemplate,
    config: BatchConfig,
    provider: CompletionProvider,
    workers: int = 4,
    already_done: Iterable[str] = (),
) -> GenerationSummary:
    """Generate definitions for every lemma not in ``already_done``.

    A provider error that survives the provider's own retries aborts the run;
    records from batches that already finished are kept so the caller can
    persist partial output.
    """
    done = set(already_done)
    summary = GenerationSummary()
    todo = [lemma for lemma in lemmas if lemma.surface not in done]
    summary.skipped = len(lemmas) - len(todo)
    if not todo:
        return summary

    batches = plan_batches(todo, config, template)
    results: dict[int, list[GeneratedDefinition]] = {}
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {
            pool.submit(_run_batch, batch, template, config, provider): batch
            for batch in batches
        }
        for future in as_completed(futures):
            batch = futures[future]
            try:
                records, retried, failed = future.result()
            except ProviderError as exc:
                summary.terminal_error = str(exc)
                for other in futures:
                    other.cancel()
                break
            results[batch.batch_id] = records
            summary.retried += retried
            summary.failed += len(failed)
            summary.failures.extend((surface, "empty completion") for surface in failed)

    for batch_id in sorted(results):
        summary.records.extend(results[batch_id])
    summary.generated = len(summary.records)
    return summary
