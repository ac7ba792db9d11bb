"""Tokenization, stemming and the field-weighted inverted index.

Dataset surrogates (title, tags, description) are indexed per field; title
and tags carry weight A, description weight B (A >= B). Scoring uses a
saturating term-frequency sum so each matched term contributes at most the
sum of its field weights, scaled by the term's query weight.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .geo import BBox
from .stem import porter_stem
from .stopwords import STOP_WORDS

INDEX_MAGIC = "ogdsearch-index"
INDEX_VERSION = 1


class Field(Enum):
    TITLE = "title"
    TAGS = "tags"
    DESCRIPTION = "description"


_TOKEN_SPLIT = re.compile(r"[a-z0-9]+")


def _split_tokens(text: str) -> list[str]:
    return _TOKEN_SPLIT.findall(text.lower())


def surface_tokens(text: str) -> list[str]:
    """Lowercased tokens with stop words removed, not yet stemmed.

    Query expansion operates on these surface forms; stemming happens after
    expansion so thesaurus headwords still look like real words.
    """
    return [t for t in _split_tokens(text) if t not in STOP_WORDS]


def preprocess(text: str) -> list[str]:
    """Full pipeline: lowercase, split on non-alphanumeric runs, drop stop
    words, Porter-stem. Order is preserved."""
    return [porter_stem(t) for t in surface_tokens(text)]


@dataclass(frozen=True)
class FieldWeights:
    weight_a: float = 1.0  # title and tags
    weight_b: float = 0.4  # description

    def __post_init__(self):
        if not (0.0 < self.weight_a <= 1.0 and 0.0 < self.weight_b <= 1.0):
            raise ValueError("field weights must be in (0, 1]")
        if self.weight_b > self.weight_a:
            raise ValueError("description weight must not exceed title weight")

    def for_field(self, f: Field) -> float:
        return self.weight_b if f is Field.DESCRIPTION else self.weight_a


@dataclass
class Lexeme:
    text: str
    source_field: Field
    positions: list[int] = field(default_factory=list)

    @property
    def tf(self) -> int:
        return len(self.positions)


@dataclass
class IndexedDocument:
    dataset_id: str
    lexemes: dict[str, list[Lexeme]] = field(default_factory=dict)
    bbox: BBox | None = None

    def tf(self, term: str, f: Field) -> int:
        for lex in self.lexemes.get(term, ()):
            if lex.source_field is f:
                return lex.tf
        return 0

    def contains(self, term: str) -> bool:
        return term in self.lexemes

    def _add(self, term: str, f: Field, position: int) -> None:
        for lex in self.lexemes.setdefault(term, []):
            if lex.source_field is f:
                lex.positions.append(position)
                return
        self.lexemes[term].append(Lexeme(term, f, [position]))


class Index:
    """Immutable-after-build inverted index over dataset surrogates."""

    def __init__(self, weights: FieldWeights | None = None):
        self.weights = weights or FieldWeights()
        self.documents: dict[str, IndexedDocument] = {}
        # term -> doc_id -> field name -> tf
        self.postings: dict[str, dict[str, dict[str, int]]] = {}

    def __len__(self) -> int:
        return len(self.documents)

    def _index_field(self, doc: IndexedDocument, f: Field, text: str) -> None:
        for pos, raw in enumerate(_split_tokens(text)):
            if raw in STOP_WORDS:
                continue
            term = porter_stem(raw)
            doc._add(term, f, pos)
            by_doc = self.postings.setdefault(term, {})
            by_field = by_doc.setdefault(doc.dataset_id, {})
            by_field[f.value] = by_field.get(f.value, 0) + 1

    def add_record(self, record) -> None:
        doc = IndexedDocument(dataset_id=record.id, bbox=record.bbox)
        self._index_field(doc, Field.TITLE, record.title)
        if record.tags:
            self._index_field(doc, Field.TAGS, " ".join(record.tags))
        if record.description:
            self._index_field(doc, Field.DESCRIPTION, record.description)
        self.documents[record.id] = doc

    def docs_containing(self, term: str) -> set[str]:
        return set(self.postings.get(term, ()))

    def docs_matching_all(self, terms: Sequence[str]) -> set[str]:
        """Dataset ids whose surrogate contains every one of the terms."""
        if not terms:
            return set()
        acc: set[str] | None = None
        for t in terms:
            ids = self.docs_containing(t)
            acc = ids if acc is None else acc & ids
            if not acc:
                return set()
        return acc or set()


def build_index(records: Iterable, weights: FieldWeights | None = None) -> Index:
    index = Index(weights)
    for record in records:
        index.add_record(record)
    return index


def text_score(
    doc: IndexedDocument,
    terms: Iterable[tuple[str, float]],
    weights: FieldWeights,
) -> float:
    """Weighted full-text score R(t) of a document against stemmed terms.

    R(t) = sum over distinct terms of q_weight * sum over fields of
    field_weight * tf / (tf + 1). Duplicate term texts keep their maximum
    query weight.
    """
    best: dict[str, float] = {}
    for text, q_weight in terms:
        if text in best:
            best[text] = max(best[text], q_weight)
        else:
            best[text] = q_weight
    score = 0.0
    for text, q_weight in best.items():
        for f in Field:
            tf = doc.tf(text, f)
            if tf:
                score += q_weight * weights.for_field(f) * tf / (tf + 1.0)
    return score


def match_any(doc: IndexedDocument, terms: Iterable[str]) -> bool:
    return any(doc.contains(t) for t in terms)


def match_all(doc: IndexedDocument, required_terms: Iterable[str]) -> bool:
    return all(doc.contains(t) for t in required_terms)


def serialize_index(index: Index) -> bytes:
    """Deterministic JSON serialization (byte-identical for equal builds)."""
    payload = {
        "magic": INDEX_MAGIC,
        "version": INDEX_VERSION,
        "weights": {"a": index.weights.weight_a, "b": index.weights.weight_b},
        "documents": {
            doc_id: {
                "bbox": doc.bbox.to_dict() if doc.bbox else None,
                "lexemes": {
                    term: [
                        {"field": lex.source_field.value, "positions": lex.positions}
                        for lex in sorted(lexs, key=lambda l: l.source_field.value)
                    ]
                    for term, lexs in doc.lexemes.items()
                },
            }
            for doc_id, doc in index.documents.items()
        },
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_index(index: Index, path: str | Path) -> None:
    Path(path).write_bytes(serialize_index(index))


def load_index(path: str | Path) -> Index:
    payload = json.loads(Path(path).read_bytes())
    if payload.get("magic") != INDEX_MAGIC:
        raise ValueError(f"not an index file: {path}")
    if payload.get("version") != INDEX_VERSION:
        raise ValueError(f"unsupported index version {payload.get('version')}")
    index = Index(FieldWeights(payload["weights"]["a"], payload["weights"]["b"]))
    for doc_id, entry in payload["documents"].items():
        doc = IndexedDocument(
            dataset_id=doc_id,
            bbox=BBox.from_dict(entry["bbox"]) if entry["bbox"] else None,
        )
        for term, lexs in entry["lexemes"].items():
            doc.lexemes[term] = [
                Lexeme(term, Field(l["field"]), list(l["positions"])) for l in lexs
            ]
            for l in doc.lexemes[term]:
                by_doc = index.postings.setdefault(term, {})
                by_field = by_doc.setdefault(doc_id, {})
                by_field[l.source_field.value] = l.tf
        index.documents[doc_id] = doc
    return index
