"""Evaluation of a generated dictionary against reference senses.

Two tracks: lemmas with a single reference sense get the full metric panel
(lexical overlap, edit distance, embedding cosine, length statistics, per-POS
cosine breakdown); polysemous lemmas get best-sense matching by cosine, a
histogram over the matched sense ranks, and the mean best cosine.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .lexicon import (
    GeneratedDefinition,
    Lemma,
    LexigenError,
    ParseError,
    PosTag,
    ReferenceEntry,
    _POS_ALIASES,
)
from .providers import EmbeddingProvider, EmbeddingVector
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


class EmptyEvaluationError(LexigenError):
    """No lemma occurs in both the generated dictionary and the reference."""


@dataclass(frozen=True)
class EvaluationRecord:
    lemma: Lemma
    scores: MetricScores
    best_sense_id: int | None = None
    best_cosine: float | None = None

    def __post_init__(self):
        if (self.best_sense_id is None) != (self.best_cosine is None):
            raise ValueError("best_sense_id and best_cosine must be set together")
        if self.best_sense_id is not None and self.best_sense_id < 1:
            raise ValueError("best_sense_id is 1-based")


@dataclass(frozen=True)
class PosBreakdown:
    mean_cosine: float
    share_of_total: float


@dataclass(frozen=True)
class MonosemyReport:
    n: int
    aggregate: MetricScores
    by_pos: dict[PosTag, PosBreakdown]
    gen_lengths: LengthStats
    ref_lengths: LengthStats


@dataclass(frozen=True)
class PolysemyReport:
    n: int
    mean_best_cosine: float
    match_histogram: dict[int, int]
    mean_best_cosine_by_sense_id: dict[int, float]


@dataclass(frozen=True)
class EvaluationReport:
    """The structured report file: both tracks plus run metadata; the error
    taxonomy statistics are appended under ``errors`` when computed."""

    monosemy: MonosemyReport | None
    polysemy: PolysemyReport | None
    skipped: int
    meta: dict
    errors: dict | None = None


class CachingEmbedder:
    """Content-addressed cache in front of an embedding provider, so each
    distinct text is embedded exactly once per run. Requests are batched."""

    def __init__(self, provider: EmbeddingProvider, batch_size: int = 64):
        self._provider = provider
        self._batch_size = batch_size
        self._cache: dict[str, EmbeddingVector] = {}

    @staticmethod
    def _key(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        pending: list[str] = []
        pending_keys: set[str] = set()
        for text in texts:
            key = self._key(text)
            if key not in self._cache and key not in pending_keys:
                pending.append(text)
                pending_keys.add(key)
        for start in range(0, len(pending), self._batch_size):
            chunk = pending[start : start + self._batch_size]
            for text, vector in zip(chunk, self._provider.embed(chunk)):
                self._cache[self._key(text)] = vector
        return [self._cache[self._key(text)] for text in texts]

    def embed_one(self, text: str) -> EmbeddingVector:
        return self.embed([text])[0]


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _pair_scores(
    gen_text: str, ref_text: str, gen_vec: EmbeddingVector, ref_vec: EmbeddingVector
) -> MetricScores:
    gen_tokens, ref_tokens = tokenize(gen_text), tokenize(ref_text)
    return MetricScores(
        bleu_cumulative=bleu_corpus([(gen_tokens, ref_tokens)], 4),
        bleu_1gram=bleu_corpus([(gen_tokens, ref_tokens)], 1),
        levenshtein=float(levenshtein(gen_text, ref_text)),
        jaccard=jaccard(gen_tokens, ref_tokens),
        cosine=cosine(gen_vec, ref_vec),
    )


def _aggregate(scores: Sequence[MetricScores]) -> MetricScores:
    return MetricScores(
        bleu_cumulative=_mean([s.bleu_cumulative for s in scores]),
        bleu_1gram=_mean([s.bleu_1gram for s in scores]),
        levenshtein=_mean([s.levenshtein for s in scores]),
        jaccard=_mean([s.jaccard for s in scores]),
        cosine=_mean([s.cosine for s in scores]),
    )


def _select(
    gen: Sequence[GeneratedDefinition],
    refs: Mapping[str, ReferenceEntry],
    monosemous: bool,
) -> list[tuple[GeneratedDefinition, ReferenceEntry]]:
    return [
        (record, refs[record.lemma.surface])
        for record in gen
        if record.lemma.surface in refs
        and refs[record.lemma.surface].monosemous == monosemous
    ]


def evaluate_monosemous(
    gen: Sequence[GeneratedDefinition],
    refs: Mapping[str, ReferenceEntry],
    embedder: EmbeddingProvider,
) -> tuple[MonosemyReport, list[EvaluationRecord]]:
    """Score every generated definition whose lemma has exactly one reference
    sense. Lemmas absent from the reference are the caller's 'skipped' count."""
    pairs = _select(gen, refs, monosemous=True)
    if not pairs:
        raise EmptyEvaluationError("no generated lemma has a monosemous reference entry")
    cache = embedder if isinstance(embedder, CachingEmbedder) else CachingEmbedder(embedder)

    records: list[EvaluationRecord] = []
    for record, entry in pairs:
        ref_text = entry.sense_texts[0]
        gen_vec, ref_vec = cache.embed([record.text, ref_text])
        records.append(
            EvaluationRecord(record.lemma, _pair_scores(record.text, ref_text, gen_vec, ref_vec))
        )

    by_pos: dict[PosTag, PosBreakdown] = {}
    for pos in PosTag:
        cosines = [rec.scores.cosine for rec in records if rec.lemma.pos is pos]
        if cosines:
            by_pos[pos] = PosBreakdown(
                mean_cosine=_mean(cosines),
                share_of_total=len(cosines) / len(records) * 100.0,
            )
    report = MonosemyReport(
        n=len(records),
        aggregate=_aggregate([rec.scores for rec in records]),
        by_pos=by_pos,
        gen_lengths=length_stats([record.text for record, _entry in pairs]),
        ref_lengths=length_stats([entry.sense_texts[0] for _record, entry in pairs]),
    )
    return report, records


def evaluate_polysemous(
    gen: Sequence[GeneratedDefinition],
    refs: Mapping[str, ReferenceEntry],
    embedder: EmbeddingProvider,
) -> tuple[PolysemyReport, list[EvaluationRecord]]:
    """Match each generated definition against all reference senses of its
    lemma by cosine; ties break toward the lowest (most frequent) sense_id."""
    pairs = _select(gen, refs, monosemous=False)
    if not pairs:
        raise EmptyEvaluationError("no generated lemma has a polysemous reference entry")
    cache = embedder if isinstance(embedder, CachingEmbedder) else CachingEmbedder(embedder)

    records: list[EvaluationRecord] = []
    for record, entry in pairs:
        vectors = cache.embed([record.text, *entry.sense_texts])
        gen_vec, sense_vecs = vectors[0], vectors[1:]
        best_id, best_cos = 1, cosine(gen_vec, sense_vecs[0])
        for sense_id, sense_vec in enumerate(sense_vecs[1:], start=2):
            value = cosine(gen_vec, sense_vec)
            if value > best_cos:
                best_id, best_cos = sense_id, value
        best_text = entry.sense_texts[best_id - 1]
        best_vec = sense_vecs[best_id - 1]
        records.append(
            EvaluationRecord(
                lemma=record.lemma,
                scores=_pair_scores(record.text, best_text, gen_vec, best_vec),
                best_sense_id=best_id,
                best_cosine=best_cos,
            )
        )

    histogram: dict[int, int] = {}
    by_id_values: dict[int, list[float]] = {}
    for rec in records:
        histogram[rec.best_sense_id] = histogram.get(rec.best_sense_id, 0) + 1
        by_id_values.setdefault(rec.best_sense_id, []).append(rec.best_cosine)
    report = PolysemyReport(
        n=len(records),
        mean_best_cosine=_mean([rec.best_cosine for rec in records]),
        match_histogram=dict(sorted(histogram.items())),
        mean_best_cosine_by_sense_id={
            sense_id: _mean(values) for sense_id, values in sorted(by_id_values.items())
        },
    )
    return report, records


@dataclass
class EvaluationOutcome:
    monosemy: MonosemyReport | None
    polysemy: PolysemyReport | None
    records: list[EvaluationRecord]
    skipped: int


def evaluate_all(
    gen: Sequence[GeneratedDefinition],
    refs: Mapping[str, ReferenceEntry],
    embedder: EmbeddingProvider,
) -> EvaluationOutcome:
    """Run both tracks; every lemma present in gen and refs lands in exactly
    one of them. Raises EmptyEvaluationError when nothing is evaluable."""
    cache = embedder if isinstance(embedder, CachingEmbedder) else CachingEmbedder(embedder)
    skipped = sum(1 for record in gen if record.lemma.surface not in refs)

    monosemy = polysemy = None
    records: list[EvaluationRecord] = []
    if _select(gen, refs, monosemous=True):
        monosemy, mono_records = evaluate_monosemous(gen, refs, cache)
        records.extend(mono_records)
    if _select(gen, refs, monosemous=False):
        polysemy, poly_records = evaluate_polysemous(gen, refs, cache)
        records.extend(poly_records)
    if monosemy is None and polysemy is None:
        raise EmptyEvaluationError("no generated lemma occurs in the reference dictionary")
    return EvaluationOutcome(monosemy, polysemy, records, skipped)


# --- serialization -------------------------------------------------------------

def _scores_to_json(scores: MetricScores) -> dict:
    return {
        "bleu_cumulative": scores.bleu_cumulative,
        "bleu_1gram": scores.bleu_1gram,
        "levenshtein": scores.levenshtein,
        "jaccard": scores.jaccard,
        "cosine": scores.cosine,
    }


def _scores_from_json(obj: dict) -> MetricScores:
    return MetricScores(
        bleu_cumulative=float(obj["bleu_cumulative"]),
        bleu_1gram=float(obj["bleu_1gram"]),
        levenshtein=float(obj["levenshtein"]),
        jaccard=float(obj["jaccard"]),
        cosine=float(obj["cosine"]),
    )


def _lengths_to_json(stats: LengthStats) -> dict:
    return {
        "mean_words": stats.mean_words,
        "sd_words": stats.sd_words,
        "mean_chars": stats.mean_chars,
        "sd_chars": stats.sd_chars,
    }


def _lengths_from_json(obj: dict) -> LengthStats:
    return LengthStats(
        mean_words=float(obj["mean_words"]),
        sd_words=float(obj["sd_words"]),
        mean_chars=float(obj["mean_chars"]),
        sd_chars=float(obj["sd_chars"]),
    )


def _report_to_json(report: EvaluationReport) -> dict:
    obj: dict = {"skipped": report.skipped, "meta": report.meta}
    if report.monosemy is not None:
        mono = report.monosemy
        obj["monosemy"] = {
            "n": mono.n,
            "aggregate": _scores_to_json(mono.aggregate),
            "by_pos": {
                pos.name.lower(): {
                    "mean_cosine": breakdown.mean_cosine,
                    "share_of_total": breakdown.share_of_total,
                }
                for pos, breakdown in mono.by_pos.items()
            },
            "gen_lengths": _lengths_to_json(mono.gen_lengths),
            "ref_lengths": _lengths_to_json(mono.ref_lengths),
        }
    else:
        obj["monosemy"] = None
    if report.polysemy is not None:
        poly = report.polysemy
        obj["polysemy"] = {
            "n": poly.n,
            "mean_best_cosine": poly.mean_best_cosine,
            "match_histogram": {str(k): v for k, v in poly.match_histogram.items()},
            "mean_best_cosine_by_sense_id": {
                str(k): v for k, v in poly.mean_best_cosine_by_sense_id.items()
            },
        }
    else:
        obj["polysemy"] = None
    obj["errors"] = report.errors
    return obj


def _report_from_json(obj: dict) -> EvaluationReport:
    monosemy = polysemy = None
    if obj.get("monosemy") is not None:
        mono = obj["monosemy"]
        monosemy = MonosemyReport(
            n=int(mono["n"]),
            aggregate=_scores_from_json(mono["aggregate"]),
            by_pos={
                PosTag[name.upper()]: PosBreakdown(
                    mean_cosine=float(entry["mean_cosine"]),
                    share_of_total=float(entry["share_of_total"]),
                )
                for name, entry in mono["by_pos"].items()
            },
            gen_lengths=_lengths_from_json(mono["gen_lengths"]),
            ref_lengths=_lengths_from_json(mono["ref_lengths"]),
        )
    if obj.get("polysemy") is not None:
        poly = obj["polysemy"]
        polysemy = PolysemyReport(
            n=int(poly["n"]),
            mean_best_cosine=float(poly["mean_best_cosine"]),
            match_histogram={int(k): int(v) for k, v in poly["match_histogram"].items()},
            mean_best_cosine_by_sense_id={
                int(k): float(v) for k, v in poly["mean_best_cosine_by_sense_id"].items()
            },
        )
    return EvaluationReport(
        monosemy=monosemy,
        polysemy=polysemy,
        skipped=int(obj["skipped"]),
        meta=obj["meta"],
        errors=obj.get("errors"),
    )


def _record_to_json(record: EvaluationRecord) -> dict:
    obj: dict = {"lemma": record.lemma.surface}
    if record.lemma.pos is not None:
        obj["pos"] = record.lemma.pos.value
    obj["neologism"] = record.lemma.neologism
    obj["scores"] = _scores_to_json(record.scores)
    if record.best_sense_id is not None:
        obj["best_sense_id"] = record.best_sense_id
        obj["best_cosine"] = record.best_cosine
    return obj


def _record_from_json(obj: dict) -> EvaluationRecord:
    pos = _POS_ALIASES[obj["pos"]] if "pos" in obj else None
    return EvaluationRecord(
        lemma=Lemma(obj["lemma"], pos, bool(obj.get("neologism", False))),
        scores=_scores_from_json(obj["scores"]),
        best_sense_id=obj.get("best_sense_id"),
        best_cosine=obj.get("best_cosine"),
    )


def records_path_for(report_path: str | Path) -> Path:
    path = Path(report_path)
    return path.with_name(path.stem + ".records.jsonl")


def emit_report(
    report: EvaluationReport,
    records: Sequence[EvaluationRecord],
    path: str | Path,
) -> tuple[Path, Path]:
    """Write the structured report to ``path`` and the per-lemma records to
    the sibling '<stem>.records.jsonl'. Output is deterministic for identical
    inputs (sorted keys, no timestamps)."""
    path = Path(path)
    path.write_text(
        json.dumps(_report_to_json(report), ensure_ascii=False, sort_keys=True, indent=2)
        + "\n",
        encoding="utf-8",
    )
    records_path = records_path_for(path)
    with open(records_path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(_record_to_json(record), ensure_ascii=False, sort_keys=True) + "\n")
    return path, records_path


def load_report(path: str | Path) -> EvaluationReport:
    return _report_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def load_records(path: str | Path) -> list[EvaluationRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(_record_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad evaluation record: {exc}", line_no) from exc
    return records


def emit_figure_data(report: PolysemyReport | None, path: str | Path) -> Path:
    """Write 'sense_id,count,mean_best_cosine' rows in ascending sense_id
    order (header only when there is no polysemy data): the distribution of
    best-matching sense ranks for plotting."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sense_id", "count", "mean_best_cosine"])
        if report is not None:
            for sense_id in sorted(report.match_histogram):
                writer.writerow(
                    [
                        sense_id,
                        report.match_histogram[sense_id],
                        repr(report.mean_best_cosine_by_sense_id[sense_id]),
                    ]
                )
    return path
