"""Bounding-box enhancement: GeoJSON envelope, place-name lookup, country fallback.

Every record gets at most one bbox from a three-tier cascade; the provenance
records which tier succeeded. The remote entity annotator and geocoder of the
original pipeline are replaced by a local gazetteer with longest-match
scanning; a remote geocoder stays pluggable behind ``RemoteGeocoder``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import requests

from .corpus import DatasetRecord, Provenance
from .errors import (
    InvalidGeoJsonError,
    NetworkError,
    NoCoordinatesError,
    PlaceNotFoundError,
)
from .geo import BBox

log = logging.getLogger(__name__)

_WORD = re.compile(r"[a-z0-9]+")

# Country fallbacks for the portal URL tier, keyed by hostname suffix.
_PORTAL_COUNTRIES = {
    "uk": "United Kingdom",
    "ie": "Ireland",
    "us": "United States",
    "gov": "United States",
}


@dataclass(frozen=True)
class GazetteerEntry:
    name: str
    bbox: BBox
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("gazetteer entry needs a name")


def load_gazetteer(path: str | Path) -> list[GazetteerEntry]:
    entries = []
    for item in json.loads(Path(path).read_text(encoding="utf-8")):
        entries.append(
            GazetteerEntry(
                name=item["name"],
                bbox=BBox.from_dict(item["bbox"]),
                aliases=tuple(item.get("aliases", [])),
            )
        )
    return entries


def envelope_from_geojson(data: bytes | str) -> BBox:
    """Envelope of every coordinate in a GeoJSON document.

    A top-level ``bbox`` member ([west, south, east, north]) wins when
    present. Envelopes implying an antimeridian crossing are rejected.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InvalidGeoJsonError(f"not JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidGeoJsonError("top-level GeoJSON value must be an object")

    if isinstance(doc.get("bbox"), (list, tuple)):
        b = doc["bbox"]
        if len(b) == 6:  # 3D bbox: skip the altitude slots
            b = [b[0], b[1], b[3], b[4]]
        if len(b) != 4:
            raise InvalidGeoJsonError(f"bbox member has {len(doc['bbox'])} values")
        try:
            west, south, east, north = (float(v) for v in b)
        except (TypeError, ValueError) as exc:
            raise InvalidGeoJsonError("bbox member is not numeric") from exc
        if west > east:
            raise InvalidGeoJsonError("antimeridian-crossing bbox is unsupported")
        try:
            return BBox(west, east, south, north)
        except ValueError as exc:
            raise InvalidGeoJsonError(str(exc)) from exc

    coords: list[tuple[float, float]] = []
    _collect_coords(doc, coords)
    if not coords:
        raise NoCoordinatesError("GeoJSON contains no coordinates")
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    try:
        return BBox(min(xs), max(xs), min(ys), max(ys))
    except ValueError as exc:
        raise InvalidGeoJsonError(str(exc)) from exc


def _collect_coords(node, out: list[tuple[float, float]]) -> None:
    if isinstance(node, dict):
        gtype = node.get("type")
        if gtype == "FeatureCollection":
            for feature in node.get("features") or []:
                _collect_coords(feature, out)
        elif gtype == "Feature":
            _collect_coords(node.get("geometry"), out)
        elif gtype == "GeometryCollection":
            for geom in node.get("geometries") or []:
                _collect_coords(geom, out)
        elif "coordinates" in node:
            _walk_positions(node["coordinates"], out)
    # other node types carry no geometry


def _walk_positions(node, out: list[tuple[float, float]]) -> None:
    if not isinstance(node, (list, tuple)) or not node:
        return
    if isinstance(node[0], (int, float)):
        if len(node) >= 2 and isinstance(node[1], (int, float)):
            out.append((float(node[0]), float(node[1])))
        return
    for child in node:
        _walk_positions(child, out)


class _GazetteerLookup:
    """Token-tuple table over names and aliases for longest-match scanning."""

    def __init__(self, entries: Sequence[GazetteerEntry]):
        self.by_tokens: dict[tuple[str, ...], tuple[str, GazetteerEntry]] = {}
        self.by_key: dict[str, tuple[str, GazetteerEntry]] = {}
        self.max_len = 0
        for entry in entries:
            for surface in (entry.name, *entry.aliases):
                tokens = tuple(_WORD.findall(surface.casefold()))
                if not tokens:
                    continue
                self.by_tokens.setdefault(tokens, (surface, entry))
                self.by_key.setdefault(" ".join(tokens), (surface, entry))
                self.max_len = max(self.max_len, len(tokens))


def extract_place_names(
    title: str,
    description: str,
    gazetteer: Sequence[GazetteerEntry],
) -> list[tuple[str, BBox]]:
    """Scan title then description for gazetteer names, longest match first.

    Matching is case-insensitive and aligned on token boundaries; each position
    is consumed by at most one match. Results keep discovery order and are
    deduplicated by matched name.
    """
    lookup = _GazetteerLookup(gazetteer)
    found: list[tuple[str, BBox]] = []
    seen: set[str] = set()
    for text in (title, description):
        tokens = _WORD.findall((text or "").casefold())
        i = 0
        while i < len(tokens):
            match = None
            for width in range(min(lookup.max_len, len(tokens) - i), 0, -1):
                candidate = tuple(tokens[i : i + width])
                if candidate in lookup.by_tokens:
                    match = (width, *lookup.by_tokens[candidate])
                    break
            if match:
                width, surface, entry = match
                key = surface.casefold()
                if key not in seen:
                    seen.add(key)
                    found.append((surface, entry.bbox))
                i += width
            else:
                i += 1
    return found


class RemoteGeocoder:
    """Optional HTTP geocoder with an on-disk response cache.

    The search endpoint must return a JSON array whose first element carries a
    "boundingbox" of [min_lat, max_lat, min_lon, max_lon]; note the lat/lon
    order swap relative to BBox.
    """

    def __init__(
        self,
        base_url: str,
        cache_dir: str | Path,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.session = session or requests.Session()

    def _cache_path(self, place: str) -> Path:
        normalized = " ".join(place.casefold().split())
        digest = hashlib.sha256(normalized.encode("utf-8")).hexdigest()
        return self.cache_dir / f"{digest}.json"

    def lookup(self, place: str) -> BBox | None:
        cache_path = self._cache_path(place)
        if cache_path.exists():
            payload = json.loads(cache_path.read_text(encoding="utf-8"))
        else:
            try:
                resp = self.session.get(
                    self.base_url,
                    params={"q": place, "format": "json", "limit": 1},
                    timeout=30.0,
                )
                resp.raise_for_status()
                payload = resp.json()
            except (requests.RequestException, json.JSONDecodeError) as exc:
                raise NetworkError(f"remote geocoder failed for {place!r}: {exc}") from exc
            _atomic_write_json(cache_path, payload)
        if not isinstance(payload, list) or not payload:
            return None
        box = payload[0].get("boundingbox")
        if not box or len(box) != 4:
            return None
        min_lat, max_lat, min_lon, max_lon = (float(v) for v in box)
        return BBox(min_lon, max_lon, min_lat, max_lat)


def _atomic_write_json(path: Path, payload) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def geocode(
    place: str,
    gazetteer: Sequence[GazetteerEntry],
    remote: RemoteGeocoder | None = None,
) -> BBox:
    """Resolve a place name to a bbox: gazetteer first, then the remote."""
    if not place:
        raise PlaceNotFoundError("empty place name")
    lookup = _GazetteerLookup(gazetteer)
    key = " ".join(_WORD.findall(place.casefold()))
    hit = lookup.by_key.get(key)
    if hit:
        return hit[1].bbox
    if remote is not None:
        bbox = remote.lookup(place)
        if bbox is not None:
            return bbox
    raise PlaceNotFoundError(f"cannot geocode {place!r}")


def portal_country(portal_url: str) -> str | None:
    host = urllib.parse.urlparse(portal_url).netloc or portal_url
    suffix = host.rsplit(".", 1)[-1].lower() if "." in host else host.lower()
    return _PORTAL_COUNTRIES.get(suffix)


def enhance(
    record: DatasetRecord,
    geojson: bytes | str | None = None,
    gazetteer: Sequence[GazetteerEntry] = (),
    remote: RemoteGeocoder | None = None,
    country_hint: str | None = None,
) -> DatasetRecord:
    """Assign a bbox via the three-tier cascade; never downgrades.

    Tier 1: envelope of the supplied GeoJSON bytes. Tier 2: first place name
    recognized in title then description. Tier 3: the portal's country. A
    record that already has a bbox is returned unchanged.
    """
    if record.bbox is not None:
        return record

    if geojson is not None:
        try:
            return record.with_bbox(
                envelope_from_geojson(geojson), Provenance.GEOJSON_ENVELOPE
            )
        except (InvalidGeoJsonError, NoCoordinatesError) as exc:
            log.debug("record %s: geojson tier failed (%s)", record.id, exc)

    matches = extract_place_names(record.title, record.description, gazetteer)
    if matches:
        name = matches[0][0]
        if len(matches) > 1:
            log.debug(
                "record %s: using %r, alternatives %s",
                record.id, name, [m[0] for m in matches[1:]],
            )
        try:
            return record.with_bbox(
                geocode(name, gazetteer, remote), Provenance.PLACE_NAME
            )
        except PlaceNotFoundError:
            pass

    country = country_hint or portal_country(record.portal)
    if country:
        try:
            return record.with_bbox(
                geocode(country, gazetteer, remote), Provenance.PORTAL_COUNTRY
            )
        except PlaceNotFoundError:
            log.debug("record %s: country tier failed for %r", record.id, country)

    return record


def enhance_all(
    records: Iterable[DatasetRecord],
    gazetteer: Sequence[GazetteerEntry],
    *,
    geojson_for: dict[str, bytes] | None = None,
    remote: RemoteGeocoder | None = None,
    country_hint: str | None = None,
) -> list[DatasetRecord]:
    geojson_for = geojson_for or {}
    return [
        enhance(r, geojson_for.get(r.id), gazetteer, remote, country_hint)
        for r in records
    ]
