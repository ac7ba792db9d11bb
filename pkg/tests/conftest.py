"""Shared fixtures: paths, fixture-backed engine, synthetic latency corpus."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from ogdsearch.corpus import DatasetRecord, Provenance, read_corpus
from ogdsearch.enhance import load_gazetteer
from ogdsearch.engine import SearchEngine
from ogdsearch.expand import ConceptNetClient, ExpansionSources, load_thesaurus
from ogdsearch.geo import BBox
from ogdsearch.textindex import build_index

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def gazetteer():
    return load_gazetteer(FIXTURES / "gazetteer.json")


@pytest.fixture(scope="session")
def thesaurus():
    return load_thesaurus(FIXTURES / "thesaurus.json")


@pytest.fixture(scope="session")
def conceptnet_client():
    return ConceptNetClient(FIXTURES / "conceptnet", offline=True)


@pytest.fixture(scope="session")
def fixture_records():
    return read_corpus(FIXTURES / "corpus.jsonl")


@pytest.fixture(scope="session")
def expansion_sources(thesaurus, conceptnet_client):
    return ExpansionSources(thesaurus=thesaurus, conceptnet=conceptnet_client)


@pytest.fixture(scope="session")
def fixture_engine(fixture_records, gazetteer, expansion_sources):
    return SearchEngine(
        index=build_index(fixture_records),
        gazetteer=gazetteer,
        sources=expansion_sources,
    )


# --- synthetic corpus for the latency criterion -----------------------------

_THEME_WORDS = [
    "population", "learning", "transport", "communities", "health", "housing",
    "budget", "crime", "schools", "parks", "air", "water", "roads", "rail",
    "energy", "planning", "heritage", "flood", "broadband", "employment",
    "universe", "education", "conveyance", "residential", "people", "village",
]
_FILLER_WORDS = [
    "annual", "regional", "district", "survey", "statistics", "monitoring",
    "national", "local", "summary", "register", "index", "records", "zones",
    "network", "points", "boundaries", "projections", "estimates", "quality",
]
_REGIONS = [
    ("england", BBox(-6.42, 1.77, 49.86, 55.81)),
    ("wales", BBox(-5.47, -2.65, 51.35, 53.43)),
    ("ireland", BBox(-10.48, -5.99, 51.42, 55.39)),
    ("fairfax", BBox(-77.54, -77.04, 38.60, 39.06)),
    ("uk", BBox(-8.62, 1.77, 49.84, 60.86)),
    ("us", BBox(-124.85, -66.88, 24.40, 49.38)),
    ("germany", BBox(5.87, 15.04, 47.27, 55.06)),
]


def make_synthetic_records(n: int, seed: int = 1234) -> list[DatasetRecord]:
    rng = random.Random(seed)
    records = []
    for i in range(n):
        theme = rng.choice(_THEME_WORDS)
        words = [theme] + rng.sample(_FILLER_WORDS, k=3)
        rng.shuffle(words)
        region_name, region_box = rng.choice(_REGIONS)
        # jittered sub-box inside the region so similarity scores vary
        w = region_box.width * rng.uniform(0.2, 1.0)
        h = region_box.height * rng.uniform(0.2, 1.0)
        x0 = region_box.min_x + (region_box.width - w) * rng.random()
        y0 = region_box.min_y + (region_box.height - h) * rng.random()
        has_bbox = rng.random() > 0.05
        records.append(
            DatasetRecord(
                id=f"synth-{i:05d}",
                title=" ".join(words).capitalize(),
                description=f"{theme.capitalize()} data for the {region_name} region, series {i}.",
                tags=[theme, region_name],
                portal="https://data.example.org",
                resource_urls=[(f"https://data.example.org/ds/{i}.geojson", "GEOJSON")],
                bbox=BBox(x0, x0 + w, y0, y0 + h) if has_bbox else None,
                bbox_provenance=Provenance.GEOJSON_ENVELOPE if has_bbox else Provenance.NONE,
            )
        )
    return records


@pytest.fixture(scope="session")
def latency_engine(gazetteer, expansion_sources):
    records = make_synthetic_records(2500)
    return SearchEngine(
        index=build_index(records),
        gazetteer=gazetteer,
        sources=expansion_sources,
    )
