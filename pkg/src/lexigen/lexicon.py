"""Domain types, lemma-list ingestion, and dictionary persistence.

The on-disk formats are line-oriented and UTF-8 throughout: lemma lists are
plain text (one lemma per line, optional tab-separated POS and "neo" columns),
generated and reference dictionaries are JSON records, one per line.
"""

from __future__ import annotations

import enum
import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence


class LexigenError(Exception):
    """Base class for all toolkit errors."""


class ParseError(LexigenError):
    """Malformed input file; carries the offending line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class PosTag(enum.Enum):
    NOUN = "N"
    VERB = "V"
    ADJECTIVE = "ADJ"
    ADVERB = "ADV"


_POS_ALIASES = {tag.value: tag for tag in PosTag}


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Lemma:
    """A surface form to define. Identity is the NFC-normalized surface,
    case-sensitive."""

    surface: str
    pos: PosTag | None = None
    neologism: bool = False

    def __post_init__(self):
        surface = nfc(self.surface)
        if not surface or surface != surface.strip():
            raise ValueError(f"lemma surface must be non-empty and trimmed: {self.surface!r}")
        if "\n" in surface or "\r" in surface:
            raise ValueError(f"lemma surface must not contain newlines: {self.surface!r}")
        object.__setattr__(self, "surface", surface)


@dataclass(frozen=True)
class LemmaList:
    """Ordered, duplicate-free sequence of lemmas (source order preserved)."""

    lemmas: tuple[Lemma, ...]

    def __post_init__(self):
        seen = set()
        for lemma in self.lemmas:
            if lemma.surface in seen:
                raise ValueError(f"duplicate lemma in list: {lemma.surface!r}")
            seen.add(lemma.surface)

    def __len__(self) -> int:
        return len(self.lemmas)

    def __iter__(self):
        return iter(self.lemmas)

    def __getitem__(self, idx):
        return self.lemmas[idx]


@dataclass(frozen=True)
class GeneratedDefinition:
    """One generated dictionary entry plus its generation metadata."""

    lemma: Lemma
    text: str
    prompt_id: str
    batch_id: int
    tokens_prompt: int = 0
    tokens_completion: int = 0
    cost_eur: float = 0.0

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("definition text must be non-empty after trimming")
        if self.cost_eur < 0:
            raise ValueError("cost_eur must be >= 0")
        if self.tokens_prompt < 0 or self.tokens_completion < 0:
            raise ValueError("token counts must be >= 0")


@dataclass(frozen=True)
class ReferenceEntry:
    """A lemma with its ordered reference senses (sense_id is 1-based rank)."""

    lemma: Lemma
    senses: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not self.senses:
            raise ValueError(f"reference entry for {self.lemma.surface!r} has no senses")
        for position, (sense_id, _text) in enumerate(self.senses, start=1):
            if sense_id != position:
                raise ValueError(
                    f"sense ids for {self.lemma.surface!r} must be consecutive from 1"
                )

    @property
    def monosemous(self) -> bool:
        return len(self.senses) == 1

    @property
    def sense_texts(self) -> tuple[str, ...]:
        return tuple(text for _id, text in self.senses)


@dataclass
class LemmaParseResult:
    lemmas: LemmaList
    duplicates_dropped: int = 0


def parse_lemma_list(text: str, pos_columns: bool = True) -> LemmaParseResult:
    """Parse a lemma-list file: one lemma per line, optional POS column
    (N/V/ADJ/ADV) and optional "neo" flag column, tab-separated.

    Blank lines and '#' comments are skipped. Duplicates (after NFC) are
    dropped keeping the first occurrence, counted in the result. With
    ``pos_columns=False`` each line is taken verbatim as a bare surface.
    """
    lemmas: list[Lemma] = []
    seen: set[str] = set()
    duplicates = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if pos_columns:
            columns = [col.strip() for col in line.split("\t")]
        else:
            columns = [line]
        surface = columns[0]
        pos: PosTag | None = None
        neologism = False
        if len(columns) >= 2 and columns[1]:
            try:
                pos = _POS_ALIASES[columns[1].upper()]
            except KeyError:
                raise ParseError(f"unknown POS tag {columns[1]!r}", line_no) from None
        if len(columns) >= 3 and columns[2]:
            if columns[2].lower() != "neo":
                raise ParseError(f"unexpected flag {columns[2]!r} (only 'neo' allowed)", line_no)
            neologism = True
        if len(columns) > 3:
            raise ParseError(f"too many columns ({len(columns)})", line_no)
        lemma = Lemma(surface, pos, neologism)
        if lemma.surface in seen:
            duplicates += 1
            continue
        seen.add(lemma.surface)
        lemmas.append(lemma)
    return LemmaParseResult(LemmaList(tuple(lemmas)), duplicates)


def load_lemma_list(path: str | Path, pos_columns: bool = True) -> LemmaParseResult:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8 ({exc})") from exc
    return parse_lemma_list(text, pos_columns)


def serialize_lemma_list(lemmas: LemmaList) -> str:
    lines = []
    for lemma in lemmas:
        columns = [lemma.surface]
        if lemma.pos is not None or lemma.neologism:
            columns.append(lemma.pos.value if lemma.pos is not None else "")
        if lemma.neologism:
            columns.append("neo")
        lines.append("\t".join(columns))
    return "".join(line + "\n" for line in lines)


def _record_to_json(record: GeneratedDefinition) -> dict:
    obj: dict = {"lemma": record.lemma.surface}
    if record.lemma.pos is not None:
        obj["pos"] = record.lemma.pos.value
    obj["neologism"] = record.lemma.neologism
    obj["text"] = record.text
    obj["prompt_id"] = record.prompt_id
    obj["batch_id"] = record.batch_id
    obj["tokens_prompt"] = record.tokens_prompt
    obj["tokens_completion"] = record.tokens_completion
    obj["cost_eur"] = record.cost_eur
    return obj


def _record_from_json(obj: dict) -> GeneratedDefinition:
    pos = _POS_ALIASES[obj["pos"]] if "pos" in obj else None
    lemma = Lemma(obj["lemma"], pos, bool(obj.get("neologism", False)))
    return GeneratedDefinition(
        lemma=lemma,
        text=obj["text"],
        prompt_id=obj["prompt_id"],
        batch_id=int(obj["batch_id"]),
        tokens_prompt=int(obj["tokens_prompt"]),
        tokens_completion=int(obj["tokens_completion"]),
        cost_eur=float(obj["cost_eur"]),
    )


def save_dictionary(entries: Sequence[GeneratedDefinition], path: str | Path) -> None:
    """Write one JSON record per line; '\\n' inside texts is escaped by JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in entries:
            fh.write(json.dumps(_record_to_json(record), ensure_ascii=False) + "\n")


def append_dictionary(entries: Sequence[GeneratedDefinition], path: str | Path) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for record in entries:
            fh.write(json.dumps(_record_to_json(record), ensure_ascii=False) + "\n")


def load_dictionary(path: str | Path) -> list[GeneratedDefinition]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(_record_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad dictionary record: {exc}", line_no) from exc
    return records


def load_reference_dictionary(path: str | Path) -> dict[str, ReferenceEntry]:
    """Load reference entries keyed by NFC lemma surface.

    Duplicate lemmas and entries with zero senses are errors: the reference
    is the ground truth and must be unambiguous.
    """
    entries: dict[str, ReferenceEntry] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                surface = obj["lemma"]
                sense_texts = obj["senses"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"bad reference record: {exc}", line_no) from exc
            if not isinstance(sense_texts, list) or not sense_texts:
                raise ParseError(f"entry {surface!r} has no senses", line_no)
            lemma = Lemma(surface)
            if lemma.surface in entries:
                raise ParseError(f"duplicate reference lemma {surface!r}", line_no)
            senses = tuple((i, str(text)) for i, text in enumerate(sense_texts, start=1))
            entries[lemma.surface] = ReferenceEntry(lemma, senses)
    return entries


def save_reference_dictionary(entries: Iterable[ReferenceEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            obj = {"lemma": entry.lemma.surface, "senses": list(entry.sense_texts)}
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
