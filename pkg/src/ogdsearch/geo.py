"""Bounding boxes, spatial predicates and the two spatial similarity functions.

All geometry is planar in geographic degrees: boxes are treated as filled
axis-aligned rectangles, distances are Euclidean in degree space, and no
geodesic correction is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class SimilarityMethod(Enum):
    AO = "ao"
    HD = "hd"
    NONE = "none"


@dataclass(frozen=True)
class SpatialScore:
    """A raw spatial similarity value and, once known, its batch-normalized form."""

    raw: float
    method: SimilarityMethod
    normalized: float | None = None

    def __post_init__(self):
        if self.raw < 0:
            raise ValueError(f"raw spatial score must be non-negative: {self.raw}")
        if self.method is SimilarityMethod.AO and self.raw > 1.0:
            raise ValueError(f"area-of-overlap score out of [0, 1]: {self.raw}")
        if self.normalized is not None and not (0.0 <= self.normalized <= 1.0):
            raise ValueError(f"normalized score out of [0, 1]: {self.normalized}")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned geographic bounding box (min_x, max_x, min_y, max_y).

    Degenerate boxes (points and lines) are allowed; antimeridian-crossing
    extents are not.
    """

    min_x: float
    max_x: float
    min_y: float
    max_y: float

    def __post_init__(self):
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError(f"inverted bounds: {self}")
        if not (-180.0 <= self.min_x <= 180.0 and -180.0 <= self.max_x <= 180.0):
            raise ValueError(f"longitude out of range: {self}")
        if not (-90.0 <= self.min_y <= 90.0 and -90.0 <= self.max_y <= 90.0):
            raise ValueError(f"latitude out of range: {self}")

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def area(self) -> float:
        return self.width * self.height

    def corners(self) -> tuple[tuple[float, float], ...]:
        return (
            (self.min_x, self.min_y),
            (self.min_x, self.max_y),
            (self.max_x, self.min_y),
            (self.max_x, self.max_y),
        )

    def to_dict(self) -> dict[str, float]:
        return {
            "min_x": self.min_x,
            "max_x": self.max_x,
            "min_y": self.min_y,
            "max_y": self.max_y,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BBox":
        return cls(
            min_x=float(d["min_x"]),
            max_x=float(d["max_x"]),
            min_y=float(d["min_y"]),
            max_y=float(d["max_y"]),
        )


def intersects(a: BBox, b: BBox) -> bool:
    """True iff the closed boxes share at least one point.

    Touching edges and corners count as intersection.
    """
    return (
        a.min_x <= b.max_x
        and b.min_x <= a.max_x
        and a.min_y <= b.max_y
        and b.min_y <= a.max_y
    )


def area_overlap(q: BBox, d: BBox) -> float:
    """Area-of-overlap similarity as the Jaccard ratio area(q∩d) / area(q∪d).

    Two degenerate (zero-area) boxes score 1.0 when identical and 0.0
    otherwise; a degenerate box against a proper box scores 0.0.
    """
    ix = min(q.max_x, d.max_x) - max(q.min_x, d.min_x)
    iy = min(q.max_y, d.max_y) - max(q.min_y, d.min_y)
    inter = max(ix, 0.0) * max(iy, 0.0)
    union = q.area + d.area - inter
    if union <= 0.0:
        return 1.0 if q == d else 0.0
    return inter / union


def point_box_distance(x: float, y: float, box: BBox) -> float:
    """Euclidean distance from a point to the filled rectangle (0 inside)."""
    dx = max(box.min_x - x, 0.0, x - box.max_x)
    dy = max(box.min_y - y, 0.0, y - box.max_y)
    return math.hypot(dx, dy)


def _directed_hausdorff(a: BBox, b: BBox) -> float:
    # Point-to-rectangle distance is convex, so its maximum over the filled
    # rectangle a is attained at one of a's corners.
    return max(point_box_distance(x, y, b) for x, y in a.corners())


def hausdorff(a: BBox, b: BBox) -> float:
    """Symmetric Hausdorff distance between two filled rectangles, in degrees."""
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def hd_to_similarity(hd: float) -> float:
    """Invert a Hausdorff distance into a similarity: 1 / (1 + hd).

    Strictly decreasing in hd, equal to 1 at hd = 0, and independent of the
    rest of the result batch (unlike a max-based inversion).
    """
    if hd < 0:
        raise ValueError(f"negative distance: {hd}")
    return 1.0 / (1.0 + hd)


def normalize(scores: list[float]) -> list[float]:
    """Min-max normalize a non-empty score list into [0, 1].

    A degenerate range (all scores equal, including a single score) maps every
    element to 1.0 so the list still contributes fully to the aggregate.
    """
    if not scores:
        raise ValueError("cannot normalize an empty score list")
    lo = min(scores)
    hi = max(scores)
    if hi == lo:
        return [1.0] * len(scores)
    span = hi - lo
    return [(s - lo) / span for s in scores]
