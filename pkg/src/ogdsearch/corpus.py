"""CKAN portal harvesting and the line-oriented corpus file.

Every network operation has a fixture mode: a directory of saved
package-search responses named page_{offset}.json stands in for the live
portal, so tests and CI never touch the network.
"""

from __future__ import annotations

import json
import logging
import os
import time
import urllib.parse
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

import requests

from .errors import (
    CorpusParseError,
    MalformedResponseError,
    NetworkError,
    ResourceNotFoundError,
    SizeExceededError,
)
from .geo import BBox

log = logging.getLogger(__name__)

RETRY_DELAYS = (0.5, 1.0, 2.0)
DEFAULT_TIMEOUT = 30.0


class Provenance(Enum):
    GEOJSON_ENVELOPE = "GEOJSON_ENVELOPE"
    PLACE_NAME = "PLACE_NAME"
    PORTAL_COUNTRY = "PORTAL_COUNTRY"
    PORTAL_METADATA = "PORTAL_METADATA"
    NONE = "NONE"


@dataclass(frozen=True)
class PortalSource:
    base_url: str
    country_hint: str = ""
    page_size: int = 100
    max_records: int = 1000

    def __post_init__(self):
        parsed = urllib.parse.urlparse(self.base_url)
        if not parsed.scheme or not parsed.netloc:
            raise ValueError(f"base_url is not a URL: {self.base_url!r}")
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")
        if self.max_records < 1:
            raise ValueError("max_records must be >= 1")


@dataclass
class DatasetRecord:
    id: str
    title: str
    description: str = ""
    tags: list[str] = field(default_factory=list)
    portal: str = ""
    resource_urls: list[tuple[str, str]] = field(default_factory=list)
    bbox: BBox | None = None
    bbox_provenance: Provenance = Provenance.NONE

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.title:
            raise ValueError("record title must be non-empty")
        self.resource_urls = [(url, fmt.upper()) for url, fmt in self.resource_urls]
        if self.bbox is not None and self.bbox_provenance is Provenance.NONE:
            raise ValueError("a record with a bbox needs a provenance")
        if self.bbox is None and self.bbox_provenance is not Provenance.NONE:
            raise ValueError(f"provenance {self.bbox_provenance} without a bbox")

    def with_bbox(self, bbox: BBox, provenance: Provenance) -> "DatasetRecord":
        return replace(self, bbox=bbox, bbox_provenance=provenance)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "tags": list(self.tags),
            "portal": self.portal,
            "resource_urls": [[url, fmt] for url, fmt in self.resource_urls],
            "bbox": self.bbox.to_dict() if self.bbox else None,
            "bbox_provenance": self.bbox_provenance.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetRecord":
        return cls(
            id=d["id"],
            title=d["title"],
            description=d.get("description", ""),
            tags=list(d.get("tags", [])),
            portal=d.get("portal", ""),
            resource_urls=[(u, f) for u, f in d.get("resource_urls", [])],
            bbox=BBox.from_dict(d["bbox"]) if d.get("bbox") else None,
            bbox_provenance=Provenance(d.get("bbox_provenance", "NONE")),
        )


def _get_with_retries(session: requests.Session, url: str, params: dict) -> requests.Response:
    last_exc: Exception | None = None
    for attempt, delay in enumerate((*RETRY_DELAYS, None)):
        try:
            resp = session.get(url, params=params, timeout=DEFAULT_TIMEOUT)
            if resp.status_code >= 500:
                raise requests.HTTPError(f"server error {resp.status_code}")
            return resp
        except requests.RequestException as exc:
            last_exc = exc
            if delay is None:
                break
            log.debug("request failed (%s), retrying in %.1fs", exc, delay)
            time.sleep(delay)
    raise NetworkError(f"GET {url} failed after {len(RETRY_DELAYS) + 1} attempts: {last_exc}")


def _load_page(
    source: PortalSource,
    offset: int,
    format_filter: str,
    fixture_dir: str | Path | None,
    session: requests.Session | None,
) -> dict:
    if fixture_dir is not None:
        page_path = Path(fixture_dir) / f"page_{offset}.json"
        if not page_path.exists():
            raise MalformedResponseError(f"fixture page missing: {page_path}")
        raw = page_path.read_text(encoding="utf-8")
    else:
        sess = session or requests.Session()
        url = source.base_url.rstrip("/") + "/api/3/action/package_search"
        params = {
            "q": "",
            "rows": source.page_size,
            "start": offset,
            "fq": f"res_format:{format_filter}",
        }
        raw = _get_with_retries(sess, url, params).text
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedResponseError(f"page at offset {offset} is not JSON: {exc}") from exc
    if not isinstance(payload, dict) or not payload.get("success"):
        raise MalformedResponseError(f"page at offset {offset}: unexpected envelope")
    result = payload.get("result")
    if not isinstance(result, dict) or "results" not in result or "count" not in result:
        raise MalformedResponseError(f"page at offset {offset}: missing result fields")
    return result


def _package_to_record(package: dict, source: PortalSource) -> DatasetRecord | None:
    pkg_id = package.get("id") or package.get("name") or ""
    title = package.get("title") or ""
    if not pkg_id or not title:
        return None
    tags = []
    for tag in package.get("tags", []):
        name = tag.get("name") if isinstance(tag, dict) else tag
        if name:
            tags.append(str(name))
    resources = []
    for res in package.get("resources", []):
        url = res.get("url")
        if url:
            resources.append((url, str(res.get("format", "")).upper()))
    bbox = None
    provenance = Provenance.NONE
    spatial = _extract_spatial(package)
    if spatial is not None:
        bbox, provenance = spatial, Provenance.PORTAL_METADATA
    return DatasetRecord(
        id=pkg_id,
        title=title,
        description=package.get("notes") or "",
        tags=tags,
        portal=source.base_url,
        resource_urls=resources,
        bbox=bbox,
        bbox_provenance=provenance,
    )


def _extract_spatial(package: dict) -> BBox | None:
    # CKAN portals commonly carry a "spatial" extra holding GeoJSON geometry.
    spatial = package.get("spatial")
    if not spatial:
        for extra in package.get("extras", []):
            if isinstance(extra, dict) and extra.get("key") == "spatial":
                spatial = extra.get("value")
                break
    if not spatial:
        return None
    from .enhance import envelope_from_geojson
    from .errors import InvalidGeoJsonError, NoCoordinatesError

    try:
        return envelope_from_geojson(spatial)
    except (InvalidGeoJsonError, NoCoordinatesError):
        log.debug("unparseable spatial extra on package %s", package.get("id"))
        return None


def harvest_portal(
    source: PortalSource,
    resource_format_filter: str,
    *,
    fixture_dir: str | Path | None = None,
    session: requests.Session | None = None,
) -> Iterator[DatasetRecord]:
    """Yield one record per dataset with at least one matching resource.

    Pagination continues until max_records matching datasets were emitted or
    the portal is exhausted. Duplicate ids within the portal are dropped
    (first wins). Zero matches is a signal, not a failure: the stream just
    ends after a warning.
    """
    wanted = resource_format_filter.upper()
    seen: set[str] = set()
    emitted = 0
    offset = 0
    total: int | None = None
    while emitted < source.max_records and (total is None or offset < total):
        result = _load_page(source, offset, resource_format_filter, fixture_dir, session)
        total = int(result["count"])
        packages = result["results"]
        if not packages and offset == 0:
            break
        for package in packages:
            record = _package_to_record(package, source)
            if record is None:
                continue
            if record.id in seen:
                continue
            seen.add(record.id)
            if not any(fmt == wanted for _, fmt in record.resource_urls):
                continue
            yield record
            emitted += 1
            if emitted >= source.max_records:
                break
        if not packages:
            break
        offset += source.page_size
    if emitted == 0:
        log.warning("portal %s: no datasets matched format %r (EMPTY_PORTAL)",
                    source.base_url, resource_format_filter)


def fetch_resource(
    url: str,
    size_cap: int,
    *,
    session: requests.Session | None = None,
) -> bytes:
    """Fetch a resource body, aborting early once size_cap bytes are exceeded.

    Supports file:// URLs and bare local paths so fixture corpora work
    without a network.
    """
    parsed = urllib.parse.urlparse(url)
    if parsed.scheme in ("", "file"):
        path = Path(parsed.path if parsed.scheme == "file" else url)
        if not path.exists():
            raise ResourceNotFoundError(f"no such file: {url}")
        if path.stat().st_size > size_cap:
            raise SizeExceededError(f"{url} exceeds cap of {size_cap} bytes")
        return path.read_bytes()

    sess = session or requests.Session()
    last_exc: Exception | None = None
    for attempt, delay in enumerate((*RETRY_DELAYS, None)):
        try:
            with sess.get(url, stream=True, timeout=DEFAULT_TIMEOUT) as resp:
                if resp.status_code == 404:
                    raise ResourceNotFoundError(f"404 for {url}")
                if resp.status_code >= 500:
                    raise requests.HTTPError(f"server error {resp.status_code}")
                resp.raise_for_status()
                chunks: list[bytes] = []
                size = 0
                for chunk in resp.iter_content(chunk_size=65536):
                    size += len(chunk)
                    if size > size_cap:
                        raise SizeExceededError(f"{url} exceeds cap of {size_cap} bytes")
                    chunks.append(chunk)
                return b"".join(chunks)
        except (ResourceNotFoundError, SizeExceededError):
            raise
        except requests.RequestException as exc:
            last_exc = exc
            if delay is None:
                break
            time.sleep(delay)
    raise NetworkError(f"GET {url} failed after {len(RETRY_DELAYS) + 1} attempts: {last_exc}")


def write_corpus(records: Iterable[DatasetRecord], path: str | Path) -> int:
    """Write records as UTF-8 JSON-lines, sorted by dataset id.

    The sort makes emission order deterministic regardless of harvest
    interleaving. Overwrites atomically (write-temp-then-rename).
    """
    ordered = sorted(records, key=lambda r: r.id)
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        for record in ordered:
            fh.write(json.dumps(record.to_dict(), sort_keys=True))
            fh.write("\n")
    os.replace(tmp, path)
    return len(ordered)


def read_corpus(path: str | Path) -> list[DatasetRecord]:
    """Parse a JSON-lines corpus file; blank lines are ignored."""
    records = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(DatasetRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorpusParseError(line_no, str(exc)) from exc
    return records
