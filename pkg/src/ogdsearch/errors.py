"""Exception types shared across the package."""

from __future__ import annotations


class OgdSearchError(Exception):
    """Base class for all package errors."""


class NetworkError(OgdSearchError):
    """Transport failure that persisted through the bounded retries."""


class MalformedResponseError(OgdSearchError):
    """Remote response could not be parsed into the expected shape."""


class SizeExceededError(OgdSearchError):
    """A fetched resource exceeded the configured byte cap."""


class ResourceNotFoundError(OgdSearchError):
    """A resource URL resolved to nothing (HTTP 404 or missing file)."""


class CorpusParseError(OgdSearchError):
    """A corpus line failed to parse; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class InvalidGeoJsonError(OgdSearchError):
    """Input bytes are not parseable as GeoJSON, or imply an unsupported extent."""


class NoCoordinatesError(OgdSearchError):
    """GeoJSON parsed fine but contains no coordinates to envelope."""


class PlaceNotFoundError(OgdSearchError):
    """Neither the gazetteer nor the remote geocoder could resolve a place name."""


class WordNetFormatError(OgdSearchError):
    """A WordNet database line violated the expected layout."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class InsufficientDataError(OgdSearchError):
    """Too few observations for the requested statistic."""


class ZeroMeanError(OgdSearchError):
    """Coefficient of variation is undefined for a zero mean."""


class UnknownStrategyError(OgdSearchError):
    """Strategy identifier does not name one of the eleven strategies."""
