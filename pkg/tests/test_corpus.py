"""Harvesting (fixture mode), resource fetching and corpus file round-trips."""

from __future__ import annotations

import json

import pytest

from ogdsearch.corpus import (
    DatasetRecord,
    PortalSource,
    Provenance,
    fetch_resource,
    harvest_portal,
    read_corpus,
    write_corpus,
)
from ogdsearch.errors import (
    CorpusParseError,
    MalformedResponseError,
    ResourceNotFoundError,
    SizeExceededError,
)
from ogdsearch.geo import BBox


def source(**kwargs) -> PortalSource:
    defaults = dict(base_url="https://data.gov.ie", country_hint="IE", page_size=3,
                    max_records=100)
    defaults.update(kwargs)
    return PortalSource(**defaults)


class TestPortalSource:
    def test_rejects_non_url(self):
        with pytest.raises(ValueError):
            PortalSource(base_url="not a url")

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            PortalSource(base_url="https://x.org", page_size=0)
        with pytest.raises(ValueError):
            PortalSource(base_url="https://x.org", max_records=0)


class TestDatasetRecord:
    def test_formats_uppercased(self):
        rec = DatasetRecord(id="a", title="t", resource_urls=[("u", "GeoJSON")])
        assert rec.resource_urls == [("u", "GEOJSON")]

    def test_bbox_needs_provenance(self):
        with pytest.raises(ValueError):
            DatasetRecord(id="a", title="t", bbox=BBox(0, 1, 0, 1))

    def test_empty_id_rejected(self):
        with pytest.raises(ValueError):
            DatasetRecord(id="", title="t")


class TestHarvest:
    def test_fixture_portal_geojson_count(self, fixtures_dir):
        records = list(
            harvest_portal(source(), "GEOJSON", fixture_dir=fixtures_dir / "ckan" / "portal_ie")
        )
        assert len(records) == 3
        assert {r.id for r in records} == {"ie-parks", "ie-census", "ie-roads"}

    def test_duplicate_ids_dropped_first_wins(self, fixtures_dir):
        records = list(
            harvest_portal(source(), "GEOJSON", fixture_dir=fixtures_dir / "ckan" / "portal_ie")
        )
        parks = [r for r in records if r.id == "ie-parks"]
        assert len(parks) == 1
        assert parks[0].title == "Public parks and open spaces"

    def test_case_insensitive_format_filter(self, fixtures_dir):
        records = list(
            harvest_portal(source(), "geojson", fixture_dir=fixtures_dir / "ckan" / "portal_ie")
        )
        assert len(records) == 3

    def test_portal_metadata_spatial_extra(self, fixtures_dir):
        records = {
            r.id: r
            for r in harvest_portal(
                source(), "GEOJSON", fixture_dir=fixtures_dir / "ckan" / "portal_ie"
            )
        }
        parks = records["ie-parks"]
        assert parks.bbox_provenance is Provenance.PORTAL_METADATA
        assert parks.bbox == BBox(-6.4, -6.0, 53.2, 53.5)
        assert records["ie-census"].bbox is None

    def test_empty_portal_yields_nothing_and_warns(self, fixtures_dir, caplog):
        with caplog.at_level("WARNING"):
            records = list(
                harvest_portal(
                    source(), "GEOJSON", fixture_dir=fixtures_dir / "ckan" / "portal_empty"
                )
            )
        assert records == []
        assert any("EMPTY_PORTAL" in m for m in caplog.messages)

    def test_max_records_cap(self, fixtures_dir):
        records = list(
            harvest_portal(
                source(max_records=2), "GEOJSON",
                fixture_dir=fixtures_dir / "ckan" / "portal_ie",
            )
        )
        assert len(records) == 2

    def test_malformed_page_rejected(self, tmp_path):
        (tmp_path / "page_0.json").write_text("this is not json")
        with pytest.raises(MalformedResponseError):
            list(harvest_portal(source(), "GEOJSON", fixture_dir=tmp_path))

    def test_missing_envelope_rejected(self, tmp_path):
        (tmp_path / "page_0.json").write_text(json.dumps({"success": False}))
        with pytest.raises(MalformedResponseError):
            list(harvest_portal(source(), "GEOJSON", fixture_dir=tmp_path))


class TestFetchResource:
    def test_local_file_pass_through(self, tmp_path):
        target = tmp_path / "blob.bin"
        target.write_bytes(b"x" * 1024)
        assert len(fetch_resource(str(target), size_cap=10 * 1024 * 1024)) == 1024

    def test_size_cap_exceeded(self, tmp_path):
        target = tmp_path / "big.bin"
        target.write_bytes(b"x" * 2048)
        with pytest.raises(SizeExceededError):
            fetch_resource(str(target), size_cap=1024)

    def test_missing_file_not_found(self, tmp_path):
        with pytest.raises(ResourceNotFoundError):
            fetch_resource(str(tmp_path / "nope.bin"), size_cap=1024)

    def test_file_url_scheme(self, tmp_path):
        target = tmp_path / "data.geojson"
        target.write_bytes(b"{}")
        assert fetch_resource(f"file://{target}", size_cap=100) == b"{}"


class TestCorpusFile:
    def make_records(self):
        return [
            DatasetRecord(
                id="b-two",
                title="Second",
                description="with bbox",
                tags=["x"],
                portal="https://p.example",
                resource_urls=[("https://p.example/b.geojson", "GEOJSON")],
                bbox=BBox(-1, 1, -2, 2),
                bbox_provenance=Provenance.GEOJSON_ENVELOPE,
            ),
            DatasetRecord(id="a-one", title="First"),
        ]

    def test_write_returns_count_and_sorts(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        assert write_corpus(self.make_records(), path) == 2
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[0])["id"] == "a-one"

    def test_zero_records(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        assert write_corpus([], path) == 0
        assert path.read_text() == ""
        assert read_corpus(path) == []

    def test_round_trip_field_identical(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        records = self.make_records()
        write_corpus(records, path)
        loaded = read_corpus(path)
        assert loaded == sorted(records, key=lambda r: r.id)

    def test_idempotent_overwrite(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_corpus(self.make_records(), path)
        first = path.read_bytes()
        write_corpus(self.make_records(), path)
        assert path.read_bytes() == first

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        good = json.dumps(DatasetRecord(id="a", title="t").to_dict())
        path.write_text(good + "\n{broken\n" + good + "\n")
        with pytest.raises(CorpusParseError) as excinfo:
            read_corpus(path)
        assert excinfo.value.line_no == 2

    def test_shipped_fixture_corpus_is_valid(self, fixture_records):
        assert len(fixture_records) >= 50
        assert all(r.id and r.title for r in fixture_records)
        ids = [r.id for r in fixture_records]
        assert len(set(ids)) == len(ids)
