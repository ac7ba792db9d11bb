"""End-to-end execution of the eleven search strategies.

The keyword baseline folds the place into the full-text query (theme AND
place). Every spatial strategy geocodes the place, restricts candidates to
documents whose bbox intersects the query bbox, filters them by theme tokens
(each original token may match through its own expansion terms), scores text
and space independently, normalizes both lists, and ranks by their sum.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from . import geo
from .enhance import GazetteerEntry, RemoteGeocoder, geocode
from .errors import UnknownStrategyError
from .expand import (
    ExpansionConfig,
    ExpansionMode,
    ExpansionSource,
    ExpansionSources,
    expand,
)
from .geo import BBox, SimilarityMethod, SpatialScore
from .textindex import Index, preprocess, surface_tokens, text_score


class StrategyId(Enum):
    BASELINE = "baseline"
    BASELINE_AO = "baseline-ao"
    BASELINE_HD = "baseline-hd"
    WORDNET01_AO = "wordnet01-ao"
    WORDNET01_HD = "wordnet01-hd"
    WORDNET02_AO = "wordnet02-ao"
    WORDNET02_HD = "wordnet02-hd"
    CONCEPTNET01_AO = "conceptnet01-ao"
    CONCEPTNET01_HD = "conceptnet01-hd"
    CONCEPTNET02_AO = "conceptnet02-ao"
    CONCEPTNET02_HD = "conceptnet02-hd"

    @classmethod
    def parse(cls, value: str) -> "StrategyId":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise UnknownStrategyError(f"unknown strategy {value!r}")


@dataclass(frozen=True)
class StrategySpec:
    id: StrategyId
    label: str
    description: str
    uses_expansion: bool
    similarity: SimilarityMethod
    source: ExpansionSource
    mode: ExpansionMode | None
    slow: bool = False


def _spec(
    sid: StrategyId,
    label: str,
    description: str,
    similarity: SimilarityMethod,
    source: ExpansionSource = ExpansionSource.NONE,
    mode: ExpansionMode | None = None,
    slow: bool = False,
) -> StrategySpec:
    return StrategySpec(
        id=sid,
        label=label,
        description=description,
        uses_expansion=source is not ExpansionSource.NONE,
        similarity=similarity,
        source=source,
        mode=mode,
        slow=slow,
    )


_CATALOG: tuple[StrategySpec, ...] = (
    _spec(
        StrategyId.BASELINE,
        "Baseline",
        "Full-text search over theme and place terms combined (no spatial step)",
        SimilarityMethod.NONE,
    ),
    _spec(
        StrategyId.BASELINE_AO,
        "Baseline AO",
        "Spatial restriction by intersection, area-of-overlap similarity, theme full-text",
        SimilarityMethod.AO,
    ),
    _spec(
        StrategyId.BASELINE_HD,
        "Baseline HD",
        "Spatial restriction by intersection, Hausdorff similarity, theme full-text",
        SimilarityMethod.HD,
    ),
    _spec(
        StrategyId.WORDNET01_AO,
        "WordNet 01 AO",
        "WordNet synonym expansion, area-of-overlap similarity",
        SimilarityMethod.AO,
        ExpansionSource.WORDNET,
        ExpansionMode.SYNONYMS_ONLY,
    ),
    _spec(
        StrategyId.WORDNET01_HD,
        "WordNet 01 HD",
        "WordNet synonym expansion, Hausdorff similarity",
        SimilarityMethod.HD,
        ExpansionSource.WORDNET,
        ExpansionMode.SYNONYMS_ONLY,
    ),
    _spec(
        StrategyId.WORDNET02_AO,
        "WordNet 02 AO",
        "WordNet synonym/hypernym/hyponym expansion, area-of-overlap similarity",
        SimilarityMethod.AO,
        ExpansionSource.WORDNET,
        ExpansionMode.FULL,
    ),
    _spec(
        StrategyId.WORDNET02_HD,
        "WordNet 02 HD",
        "WordNet synonym/hypernym/hyponym expansion, Hausdorff similarity",
        SimilarityMethod.HD,
        ExpansionSource.WORDNET,
        ExpansionMode.FULL,
    ),
    _spec(
        StrategyId.CONCEPTNET01_AO,
        "ConceptNet 01 AO",
        "ConceptNet synonym expansion, area-of-overlap similarity",
        SimilarityMethod.AO,
        ExpansionSource.CONCEPTNET,
        ExpansionMode.SYNONYMS_ONLY,
        slow=True,
    ),
    _spec(
        StrategyId.CONCEPTNET01_HD,
        "ConceptNet 01 HD",
        "ConceptNet synonym expansion, Hausdorff similarity",
        SimilarityMethod.HD,
        ExpansionSource.CONCEPTNET,
        ExpansionMode.SYNONYMS_ONLY,
        slow=True,
    ),
    _spec(
        StrategyId.CONCEPTNET02_AO,
        "ConceptNet 02 AO",
        "ConceptNet synonym/IsA/MannerOf expansion, area-of-overlap similarity",
        SimilarityMethod.AO,
        ExpansionSource.CONCEPTNET,
        ExpansionMode.FULL,
        slow=True,
    ),
    _spec(
        StrategyId.CONCEPTNET02_HD,
        "ConceptNet 02 HD",
        "ConceptNet synonym/IsA/MannerOf expansion, Hausdorff similarity",
        SimilarityMethod.HD,
        ExpansionSource.CONCEPTNET,
        ExpansionMode.FULL,
        slow=True,
    ),
)

_BY_ID = {spec.id: spec for spec in _CATALOG}


def strategy_catalog() -> list[StrategySpec]:
    """All eleven strategies in stable order (baseline first, AO before HD)."""
    return list(_CATALOG)


def strategy_spec(strategy: StrategyId | str) -> StrategySpec:
    if isinstance(strategy, str):
        strategy = StrategyId.parse(strategy)
    return _BY_ID[strategy]


@dataclass(frozen=True)
class SearchQuery:
    theme: str
    place: str

    def __post_init__(self):
        if not self.theme.strip():
            raise ValueError("theme must be non-empty")
        if not self.place.strip():
            raise ValueError("place must be non-empty")


@dataclass
class RankedResult:
    dataset_id: str
    text_score: float
    spatial_score: SpatialScore | None
    n_text: float
    n_spatial: float | None
    aggregate: float
    rank: int = 0


def aggregate_score(n_text: float, n_spatial: float) -> float:
    """Eq-style aggregation: sum of the two normalized components."""
    for name, value in (("n_text", n_text), ("n_spatial", n_spatial)):
        if not (0.0 <= value <= 1.0):
            raise ValueError(f"{name} out of [0, 1]: {value}")
    return n_text + n_spatial


def _expansion_groups(
    theme: str,
    spec: StrategySpec,
    sources: ExpansionSources,
) -> tuple[list[set[str]], list[tuple[str, float]]]:
    """Per-original-token stemmed match groups plus the flat weighted term list.

    Each original theme token must match through its own group (token or its
    expansions); the weighted list drives scoring and deduplicates stems by
    maximum weight.
    """
    config = ExpansionConfig(
        source=spec.source,
        mode=spec.mode or ExpansionMode.SYNONYMS_ONLY,
    )
    groups: list[set[str]] = []
    weighted: dict[str, float] = {}
    for token in surface_tokens(theme):
        terms = expand([token], config, sources)
        group: set[str] = set()
        for term in terms:
            for stemmed in preprocess(term.text):
                group.add(stemmed)
                if weighted.get(stemmed, 0.0) < term.weight:
                    weighted[stemmed] = term.weight
        if group:
            groups.append(group)
    flat = sorted(weighted.items(), key=lambda kv: (-kv[1], kv[0]))
    return groups, flat


def _rank(results: list[RankedResult]) -> list[RankedResult]:
    results.sort(key=lambda r: (-r.aggregate, r.dataset_id))
    for position, result in enumerate(results, start=1):
        result.rank = position
    return results


def run_strategy(
    query: SearchQuery,
    strategy: StrategyId | str,
    index: Index,
    gazetteer: Sequence[GazetteerEntry] = (),
    sources: ExpansionSources | None = None,
    remote_geocoder: RemoteGeocoder | None = None,
) -> tuple[list[RankedResult], float]:
    """Run one strategy end-to-end; returns (ranked results, elapsed ms).

    Timing wraps the whole pipeline (geocoding, restriction, expansion,
    scoring, ranking) but not index loading. Spatial strategies raise
    PlaceNotFoundError when the place cannot be geocoded; an empty result
    list is a valid outcome.
    """
    spec = strategy_spec(strategy)
    sources = sources or ExpansionSources()
    started = time.perf_counter()

    if spec.similarity is SimilarityMethod.NONE:
        results = _run_baseline(query, index)
    else:
        results = _run_spatial(query, spec, index, gazetteer, sources, remote_geocoder)

    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return results, elapsed_ms


def _run_baseline(query: SearchQuery, index: Index) -> list[RankedResult]:
    terms: list[str] = []
    for term in preprocess(query.theme) + preprocess(query.place):
        if term not in terms:
            terms.append(term)
    candidate_ids = index.docs_matching_all(terms)
    if not candidate_ids:
        return []
    weighted = [(t, 1.0) for t in terms]
    docs = [index.documents[doc_id] for doc_id in sorted(candidate_ids)]
    raw_text = [text_score(doc, weighted, index.weights) for doc in docs]
    n_text = geo.normalize(raw_text)
    results = [
        RankedResult(
            dataset_id=doc.dataset_id,
            text_score=raw,
            spatial_score=None,
            n_text=nt,
            n_spatial=None,
            aggregate=nt,
        )
        for doc, raw, nt in zip(docs, raw_text, n_text)
    ]
    return _rank(results)


def _run_spatial(
    query: SearchQuery,
    spec: StrategySpec,
    index: Index,
    gazetteer: Sequence[GazetteerEntry],
    sources: ExpansionSources,
    remote_geocoder: RemoteGeocoder | None,
) -> list[RankedResult]:
    query_bbox = geocode(query.place, gazetteer, remote_geocoder)
    groups, weighted = _expansion_groups(query.theme, spec, sources)

    candidates = []
    for doc_id in sorted(index.documents):
        doc = index.documents[doc_id]
        if doc.bbox is None or not geo.intersects(query_bbox, doc.bbox):
            continue
        if groups and not all(any(t in doc.lexemes for t in g) for g in groups):
            continue
        candidates.append(doc)
    if not candidates:
        return []

    raw_spatial = [_spatial_similarity(query_bbox, doc.bbox, spec.similarity) for doc in candidates]
    raw_text = [text_score(doc, weighted, index.weights) for doc in candidates]
    n_spatial = geo.normalize(raw_spatial)
    n_text = geo.normalize(raw_text)

    results = [
        RankedResult(
            dataset_id=doc.dataset_id,
            text_score=rt,
            spatial_score=SpatialScore(raw=rs, method=spec.similarity, normalized=ns),
            n_text=nt,
            n_spatial=ns,
            aggregate=aggregate_score(nt, ns),
        )
        for doc, rt, rs, nt, ns in zip(candidates, raw_text, raw_spatial, n_text, n_spatial)
    ]
    return _rank(results)


def _spatial_similarity(query_bbox: BBox, doc_bbox: BBox, method: SimilarityMethod) -> float:
    if method is SimilarityMethod.AO:
        return geo.area_overlap(query_bbox, doc_bbox)
    return geo.hd_to_similarity(geo.hausdorff(query_bbox, doc_bbox))


class SearchEngine:
    """Bundles an index with its gazetteer and expansion backends."""

    def __init__(
        self,
        index: Index,
        gazetteer: Sequence[GazetteerEntry] = (),
        sources: ExpansionSources | None = None,
        remote_geocoder: RemoteGeocoder | None = None,
    ):
        self.index = index
        self.gazetteer = list(gazetteer)
        self.sources = sources or ExpansionSources()
        self.remote_geocoder = remote_geocoder

    def run(
        self, query: SearchQuery, strategy: StrategyId | str
    ) -> tuple[list[RankedResult], float]:
        return run_strategy(
            query,
            strategy,
            self.index,
            gazetteer=self.gazetteer,
            sources=self.sources,
            remote_geocoder=self.remote_geocoder,
        )
