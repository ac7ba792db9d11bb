"""Weighted query expansion from WordNet-style thesauri and ConceptNet.

Expansion operates on surface forms (thesauri key on real words); stemming is
applied downstream by the text index. The two modes mirror the study design:
synonyms only, or synonyms plus the hypernym/hyponym family (IsA/MannerOf for
ConceptNet).
"""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import requests

from .errors import NetworkError, WordNetFormatError

log = logging.getLogger(__name__)

_TOKEN = re.compile(r"[a-z0-9]+")


class ExpansionSource(Enum):
    NONE = "none"
    WORDNET = "wordnet"
    CONCEPTNET = "conceptnet"


class ExpansionMode(Enum):
    SYNONYMS_ONLY = "01"
    FULL = "02"


class Relation(Enum):
    ORIGINAL = "original"
    SYNONYM = "synonym"
    HYPERNYM = "hypernym"
    HYPONYM = "hyponym"
    ISA = "isa"
    MANNEROF = "mannerof"


# The study's expansion weight tables, verbatim.
_WEIGHTS = {
    ExpansionSource.WORDNET: {
        Relation.ORIGINAL: 1.0,
        Relation.SYNONYM: 1.0,
        Relation.HYPERNYM: 0.8,
        Relation.HYPONYM: 0.9,
    },
    ExpansionSource.CONCEPTNET: {
        Relation.ORIGINAL: 1.0,
        Relation.SYNONYM: 1.0,
        Relation.ISA: 0.9,
        Relation.MANNEROF: 0.9,
    },
    ExpansionSource.NONE: {
        Relation.ORIGINAL: 1.0,
    },
}


def expansion_weights(source: ExpansionSource, relation: Relation) -> float:
    try:
        return _WEIGHTS[source][relation]
    except KeyError:
        raise ValueError(f"no weight defined for ({source.name}, {relation.name})")


@dataclass(frozen=True)
class WeightedTerm:
    text: str
    weight: float
    relation: Relation

    def __post_init__(self):
        if not self.text:
            raise ValueError("weighted term text must be non-empty")
        if not (0.0 < self.weight <= 1.0):
            raise ValueError(f"weight out of range: {self.weight}")


@dataclass(frozen=True)
class ExpansionConfig:
    source: ExpansionSource = ExpansionSource.NONE
    mode: ExpansionMode = ExpansionMode.SYNONYMS_ONLY
    max_terms_per_relation: int = 10

    def __post_init__(self):
        if self.max_terms_per_relation < 1:
            raise ValueError("max_terms_per_relation must be >= 1")


@dataclass
class ThesaurusEntry:
    headword: str
    synonyms: list[str] = field(default_factory=list)
    hypernyms: list[str] = field(default_factory=list)
    hyponyms: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.headword:
            raise ValueError("thesaurus entry needs a headword")
        for attr in ("synonyms", "hypernyms", "hyponyms"):
            cleaned = []
            seen = set()
            for term in getattr(self, attr):
                if term and term != self.headword and term not in seen:
                    seen.add(term)
                    cleaned.append(term)
            setattr(self, attr, cleaned)

    def to_dict(self) -> dict:
        return {
            "headword": self.headword,
            "synonyms": list(self.synonyms),
            "hypernyms": list(self.hypernyms),
            "hyponyms": list(self.hyponyms),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ThesaurusEntry":
        return cls(
            headword=d["headword"],
            synonyms=list(d.get("synonyms", [])),
            hypernyms=list(d.get("hypernyms", [])),
            hyponyms=list(d.get("hyponyms", [])),
        )


Thesaurus = dict[str, ThesaurusEntry]


def load_thesaurus(path: str | Path) -> Thesaurus:
    entries = [
        ThesaurusEntry.from_dict(item)
        for item in json.loads(Path(path).read_text(encoding="utf-8"))
    ]
    return {e.headword: e for e in entries}


def save_thesaurus(thesaurus: Thesaurus, path: str | Path) -> None:
    payload = [thesaurus[k].to_dict() for k in sorted(thesaurus)]
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def thesaurus_lookup(thesaurus: Thesaurus, term: str) -> ThesaurusEntry | None:
    """Exact lookup with a light plural fallback (ies -> y, es, s)."""
    term = term.lower()
    if term in thesaurus:
        return thesaurus[term]
    if term.endswith("ies") and term[:-3] + "y" in thesaurus:
        return thesaurus[term[:-3] + "y"]
    if term.endswith("es") and term[:-2] in thesaurus:
        return thesaurus[term[:-2]]
    if term.endswith("s") and term[:-1] in thesaurus:
        return thesaurus[term[:-1]]
    return None


# --- WordNet database files (WNdb 3.x noun layout) -------------------------

_POINTER_HYPERNYM = "@"
_POINTER_HYPONYM = "~"


def _clean_lemma(raw: str) -> str:
    # strip syntactic markers like "(p)" and turn underscores into spaces
    return re.sub(r"\(.*?\)$", "", raw).replace("_", " ").lower()


def parse_wordnet_db(index_file: bytes | str, data_file: bytes | str) -> Thesaurus:
    """Build a thesaurus from WordNet index.noun / data.noun contents.

    Synonyms are co-members of a lemma's synsets; hypernyms follow "@"
    pointers, hyponyms "~" pointers. License header lines (leading spaces)
    are skipped.
    """
    if isinstance(index_file, bytes):
        index_file = index_file.decode("utf-8")
    if isinstance(data_file, bytes):
        data_file = data_file.decode("utf-8")

    synsets: dict[str, dict] = {}
    for line_no, line in enumerate(data_file.splitlines(), start=1):
        if not line.strip() or line.startswith(" "):
            continue
        body = line.split("|", 1)[0]
        parts = body.split()
        try:
            offset = parts[0]
            w_cnt = int(parts[3], 16)
            words = []
            cursor = 4
            for _ in range(w_cnt):
                words.append(_clean_lemma(parts[cursor]))
                cursor += 2  # word, lex_id
            p_cnt = int(parts[cursor])
            cursor += 1
            pointers = []
            for _ in range(p_cnt):
                symbol, target, pos, _st = parts[cursor : cursor + 4]
                pointers.append((symbol, target, pos))
                cursor += 4
        except (IndexError, ValueError) as exc:
            raise WordNetFormatError(line_no, f"bad data line: {exc}") from exc
        synsets[offset] = {"words": words, "pointers": pointers}

    thesaurus: Thesaurus = {}
    for line_no, line in enumerate(index_file.splitlines(), start=1):
        if not line.strip() or line.startswith(" "):
            continue
        parts = line.split()
        try:
            lemma = _clean_lemma(parts[0])
            synset_cnt = int(parts[2])
            p_cnt = int(parts[3])
            offsets = parts[4 + p_cnt + 2 :]
            if len(offsets) != synset_cnt:
                raise ValueError(
                    f"expected {synset_cnt} offsets, found {len(offsets)}"
                )
        except (IndexError, ValueError) as exc:
            raise WordNetFormatError(line_no, f"bad index line: {exc}") from exc

        synonyms: list[str] = []
        hypernyms: list[str] = []
        hyponyms: list[str] = []
        for offset in offsets:
            synset = synsets.get(offset)
            if synset is None:
                raise WordNetFormatError(line_no, f"unknown synset offset {offset}")
            synonyms.extend(w for w in synset["words"] if w != lemma)
            for symbol, target, _pos in synset["pointers"]:
                linked = synsets.get(target)
                if linked is None:
                    continue
                if symbol == _POINTER_HYPERNYM:
                    hypernyms.extend(linked["words"])
                elif symbol == _POINTER_HYPONYM:
                    hyponyms.extend(linked["words"])
        thesaurus[lemma] = ThesaurusEntry(
            headword=lemma,
            synonyms=synonyms,
            hypernyms=hypernyms,
            hyponyms=hyponyms,
        )
    return thesaurus


# --- ConceptNet -------------------------------------------------------------

_CONCEPTNET_RELATIONS = {
    Relation.SYNONYM: "Synonym",
    Relation.ISA: "IsA",
    Relation.MANNEROF: "MannerOf",
}


def _term_slug(term: str) -> str:
    return "_".join(_TOKEN.findall(term.lower()))


class ConceptNetClient:
    """Edge-query client with an on-disk cache and 1 rps politeness limit.

    A cache hit bypasses the network entirely, so fixture caches make the
    ConceptNet strategies fully offline.
    """

    def __init__(
        self,
        cache_dir: str | Path,
        api_base: str = "https://api.conceptnet.io",
        session: requests.Session | None = None,
        offline: bool = False,
        min_interval: float = 1.0,
    ):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.api_base = api_base.rstrip("/")
        self.session = session or requests.Session()
        self.offline = offline
        self.min_interval = min_interval
        self._lock = threading.Lock()
        self._last_request = 0.0

    def _cache_path(self, term: str, rel_name: str) -> Path:
        return self.cache_dir / f"{_term_slug(term)}__{rel_name}.json"

    def _query(self, term: str, rel_name: str, limit: int) -> dict:
        with self._lock:
            wait = self.min_interval - (time.monotonic() - self._last_request)
            if wait > 0:
                time.sleep(wait)
            try:
                resp = self.session.get(
                    f"{self.api_base}/query",
                    params={
                        "node": f"/c/en/{_term_slug(term)}",
                        "rel": f"/r/{rel_name}",
                        "limit": limit,
                    },
                    timeout=30.0,
                )
                resp.raise_for_status()
                return resp.json()
            except (requests.RequestException, json.JSONDecodeError) as exc:
                raise NetworkError(f"ConceptNet query failed for {term!r}: {exc}") from exc
            finally:
                self._last_request = time.monotonic()

    def lookup(self, term: str, relation: Relation, limit: int = 50) -> list[str]:
        """English labels of the opposite endpoints of matching edges."""
        rel_name = _CONCEPTNET_RELATIONS.get(relation)
        if rel_name is None:
            raise ValueError(f"ConceptNet does not serve relation {relation.name}")
        cache_path = self._cache_path(term, rel_name)
        if cache_path.exists():
            payload = json.loads(cache_path.read_text(encoding="utf-8"))
        else:
            if self.offline:
                raise NetworkError(
                    f"no cached ConceptNet response for ({term!r}, {rel_name}) in offline mode"
                )
            payload = self._query(term, rel_name, limit)
            _atomic_write(cache_path, payload)
        return _labels_from_edges(payload, term, limit)


def _labels_from_edges(payload: dict, term: str, limit: int) -> list[str]:
    node_id = f"/c/en/{_term_slug(term)}"
    labels: list[str] = []
    seen: set[str] = set()
    for edge in payload.get("edges", []):
        start = edge.get("start") or {}
        end = edge.get("end") or {}
        start_id = start.get("term") or start.get("@id") or ""
        other = end if start_id.startswith(node_id) else start
        if other.get("language") not in (None, "en"):
            continue
        label = (other.get("label") or "").strip().lower()
        if label and label != term.lower() and label not in seen:
            seen.add(label)
            labels.append(label)
        if len(labels) >= limit:
            break
    return labels


def _atomic_write(path: Path, payload) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def conceptnet_lookup(
    term: str,
    relation: Relation,
    client: ConceptNetClient,
    max_terms: int = 10,
) -> list[str]:
    return client.lookup(term, relation, limit=max_terms)


# --- expansion --------------------------------------------------------------


@dataclass
class ExpansionSources:
    """The lexical backends a strategy may draw on."""

    thesaurus: Thesaurus | None = None
    conceptnet: ConceptNetClient | None = None


def _relations_for(config: ExpansionConfig) -> list[Relation]:
    if config.source is ExpansionSource.WORDNET:
        if config.mode is ExpansionMode.SYNONYMS_ONLY:
            return [Relation.SYNONYM]
        return [Relation.SYNONYM, Relation.HYPERNYM, Relation.HYPONYM]
    if config.source is ExpansionSource.CONCEPTNET:
        if config.mode is ExpansionMode.SYNONYMS_ONLY:
            return [Relation.SYNONYM]
        return [Relation.SYNONYM, Relation.ISA, Relation.MANNEROF]
    return []


def _raw_terms(
    token: str,
    relation: Relation,
    config: ExpansionConfig,
    sources: ExpansionSources,
) -> list[str]:
    cap = config.max_terms_per_relation
    if config.source is ExpansionSource.WORDNET:
        if sources.thesaurus is None:
            raise ValueError("WordNet expansion requested but no thesaurus loaded")
        entry = thesaurus_lookup(sources.thesaurus, token)
        if entry is None:
            return []
        listing = {
            Relation.SYNONYM: entry.synonyms,
            Relation.HYPERNYM: entry.hypernyms,
            Relation.HYPONYM: entry.hyponyms,
        }[relation]
        return listing[:cap]
    if config.source is ExpansionSource.CONCEPTNET:
        if sources.conceptnet is None:
            raise ValueError("ConceptNet expansion requested but no client configured")
        return conceptnet_lookup(token, relation, sources.conceptnet, max_terms=cap)
    return []


def expand(
    theme_tokens: Sequence[str],
    config: ExpansionConfig,
    sources: ExpansionSources | None = None,
) -> list[WeightedTerm]:
    """Expand surface tokens into a weighted term list.

    Originals always come through at weight 1.0. Multiword expansion terms
    stay in the list and are additionally split so every token carries the
    term's weight; duplicates keep the maximum weight (first relation wins on
    ties). Output is sorted by weight descending, then text.
    """
    sources = sources or ExpansionSources()
    collected: dict[str, WeightedTerm] = {}

    def _offer(text: str, weight: float, relation: Relation) -> None:
        tokens = _TOKEN.findall(text.lower())
        variants = [" ".join(tokens)] if tokens else []
        if len(tokens) > 1:
            variants.extend(tokens)  # split tokens match individually downstream
        for variant in variants:
            existing = collected.get(variant)
            if existing is None or weight > existing.weight:
                collected[variant] = WeightedTerm(variant, weight, relation)

    for token in theme_tokens:
        _offer(token, expansion_weights(config.source, Relation.ORIGINAL), Relation.ORIGINAL)
    for relation in _relations_for(config):
        weight = expansion_weights(config.source, relation)
        for token in theme_tokens:
            for raw in _raw_terms(token, relation, config, sources):
                _offer(raw, weight, relation)

    return sorted(collected.values(), key=lambda t: (-t.weight, t.text))
