"""Rating analysis (DCG, coefficient of variation, Borda) and the
strategy-by-query performance benchmark.

Strategy and query identifiers are plain strings here so the math can be fed
historical tables as easily as live engine output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .engine import SearchEngine, SearchQuery, StrategyId, strategy_catalog, strategy_spec
from .errors import InsufficientDataError, ZeroMeanError

RATINGS_HEADER = ["user_id", "query_id", "strategy", "position", "dataset_id", "stars"]

DEFAULT_QUERIES = (
    ("q1", SearchQuery("Population", "England")),
    ("q2", SearchQuery("Learning", "Wales")),
    ("q3", SearchQuery("Transport", "Fairfax")),
    ("q4", SearchQuery("Communities", "Republic of Ireland")),
)


@dataclass(frozen=True)
class RatingRecord:
    user_id: str
    query_id: str
    strategy: str
    position: int
    dataset_id: str
    stars: int

    def __post_init__(self):
        if not (1 <= self.position <= 7):
            raise ValueError(f"position out of [1, 7]: {self.position}")
        if not (0 <= self.stars <= 5):
            raise ValueError(f"stars out of [0, 5]: {self.stars}")
        if not self.user_id or not self.query_id or not self.strategy:
            raise ValueError("user_id, query_id and strategy must be non-empty")


def dcg(ratings: Sequence[float], p: int = 7) -> float:
    """Discounted cumulative gain at cutoff p.

    Shorter vectors are zero-padded to p; the first position is undiscounted
    and position i contributes rel_i / log2(i).
    """
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"cutoff must be a positive integer: {p!r}")
    if len(ratings) > p:
        raise ValueError(f"{len(ratings)} ratings exceed cutoff {p}")
    padded = list(ratings) + [0.0] * (p - len(ratings))
    total = float(padded[0])
    for i in range(2, p + 1):
        total += padded[i - 1] / math.log2(i)
    return total


@dataclass
class DcgTable:
    """Mean DCG per (strategy, query) cell plus the underlying per-user DCGs."""

    values: dict[tuple[str, str], float] = field(default_factory=dict)
    per_user: dict[tuple[str, str, str], float] = field(default_factory=dict)

    def user_dcgs(self, strategy: str, query_id: str) -> list[float]:
        return [
            v
            for (s, q, _u), v in sorted(self.per_user.items())
            if s == strategy and q == query_id
        ]


def mean_dcg(records: Iterable[RatingRecord], p: int = 7) -> DcgTable:
    """Per-user DCGs averaged into cells.

    A user only counts toward a cell when all positions 1..p are rated
    (partial raters are excluded); positions beyond p are ignored. Duplicate
    (user, query, strategy, position) entries with conflicting stars are
    rejected so the result cannot depend on record order.
    """
    by_cell_user: dict[tuple[str, str, str], dict[int, int]] = {}
    for rec in records:
        if rec.position > p:
            continue
        key = (rec.strategy, rec.query_id, rec.user_id)
        positions = by_cell_user.setdefault(key, {})
        if rec.position in positions and positions[rec.position] != rec.stars:
            raise ValueError(
                f"conflicting ratings for {key} position {rec.position}"
            )
        positions[rec.position] = rec.stars

    table = DcgTable()
    cells: dict[tuple[str, str], list[float]] = {}
    for (strategy, query_id, user_id), positions in by_cell_user.items():
        if any(i not in positions for i in range(1, p + 1)):
            continue
        value = dcg([positions[i] for i in range(1, p + 1)], p)
        table.per_user[(strategy, query_id, user_id)] = value
        cells.setdefault((strategy, query_id), []).append(value)
    for cell, values in cells.items():
        table.values[cell] = sum(values) / len(values)
    return table


def coefficient_of_variation(per_user_dcgs: Sequence[float]) -> float:
    """Sample standard deviation over mean, as a percentage."""
    if len(per_user_dcgs) < 2:
        raise InsufficientDataError(
            f"need at least 2 observations, got {len(per_user_dcgs)}"
        )
    mean = statistics.fmean(per_user_dcgs)
    if mean == 0:
        raise ZeroMeanError("coefficient of variation undefined for zero mean")
    return 100.0 * statistics.stdev(per_user_dcgs) / mean


def borda_points(
    means: Mapping[tuple[str, str], float],
    strategies: Sequence[str],
    queries: Sequence[str],
) -> dict[tuple[str, str], int]:
    """Competition-ranked points per (strategy, query).

    Strategies are sorted by mean DCG descending per query; every member of a
    tie block receives (n-1) minus the block's starting index. Strategies with
    no value for a query rank strictly last (as one final tie block).
    """
    if len(strategies) < 2:
        raise ValueError("Borda needs at least 2 strategies")
    n = len(strategies)
    points: dict[tuple[str, str], int] = {}
    for query in queries:
        present = [(s, means[(s, query)]) for s in strategies if (s, query) in means]
        missing = [s for s in strategies if (s, query) not in means]
        present.sort(key=lambda sv: -sv[1])
        index = 0
        while index < len(present):
            block_end = index
            while (
                block_end + 1 < len(present)
                and present[block_end + 1][1] == present[index][1]
            ):
                block_end += 1
            for j in range(index, block_end + 1):
                points[(present[j][0], query)] = (n - 1) - index
            index = block_end + 1
        for s in missing:
            points[(s, query)] = (n - 1) - index
    return points


def borda(
    means: Mapping[tuple[str, str], float] | DcgTable,
    strategies: Sequence[str],
    queries: Sequence[str],
) -> dict[str, int]:
    """Total Borda score per strategy, summed over queries."""
    values = means.values if isinstance(means, DcgTable) else means
    points = borda_points(values, strategies, queries)
    return {s: sum(points[(s, q)] for q in queries) for s in strategies}


def cv_table(
    table: DcgTable,
    strategies: Sequence[str],
    queries: Sequence[str],
) -> dict[tuple[str, str], float]:
    """Coefficient of variation per cell; cells without enough raters are skipped."""
    out: dict[tuple[str, str], float] = {}
    for s in strategies:
        for q in queries:
            values = table.user_dcgs(s, q)
            try:
                out[(s, q)] = coefficient_of_variation(values)
            except (InsufficientDataError, ZeroMeanError):
                continue
    return out


def cv_row_averages(
    cells: Mapping[tuple[str, str], float],
    strategies: Sequence[str],
    queries: Sequence[str],
) -> dict[str, float]:
    """Mean CV per strategy over the queries that have a cell."""
    out: dict[str, float] = {}
    for s in strategies:
        row = [cells[(s, q)] for q in queries if (s, q) in cells]
        if row:
            out[s] = sum(row) / len(row)
    return out


def cv_global_average(row_averages: Mapping[str, float]) -> float:
    """The study-level figure: mean of the per-strategy row averages."""
    if not row_averages:
        raise InsufficientDataError("no rows to average")
    return sum(row_averages.values()) / len(row_averages)


# --- ratings CSV -------------------------------------------------------------


def write_ratings_csv(records: Iterable[RatingRecord], path: str | Path) -> int:
    rows = list(records)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RATINGS_HEADER)
        for rec in rows:
            writer.writerow(
                [rec.user_id, rec.query_id, rec.strategy, rec.position, rec.dataset_id, rec.stars]
            )
    return len(rows)


def read_ratings_csv(source: str | Path | io.TextIOBase) -> list[RatingRecord]:
    if isinstance(source, (str, Path)):
        with Path(source).open("r", encoding="utf-8", newline="") as fh:
            return _parse_ratings(fh)
    return _parse_ratings(source)


def _parse_ratings(fh) -> list[RatingRecord]:
    reader = csv.DictReader(fh)
    missing = set(RATINGS_HEADER) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"ratings CSV missing columns: {sorted(missing)}")
    return [
        RatingRecord(
            user_id=row["user_id"],
            query_id=row["query_id"],
            strategy=row["strategy"],
            position=int(row["position"]),
            dataset_id=row["dataset_id"],
            stars=int(row["stars"]),
        )
        for row in reader
    ]


# --- performance benchmark ---------------------------------------------------


@dataclass
class BenchRow:
    strategy: str
    theme: str
    place: str
    elapsed_ms: float
    result_count: int
    error: str | None = None

    def to_dict(self) -> dict:
        d = {
            "strategy": self.strategy,
            "theme": self.theme,
            "place": self.place,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "result_count": self.result_count,
        }
        if self.error:
            d["error"] = self.error
        return d


@dataclass
class BenchReport:
    rows: list[BenchRow]
    environment: str

    def to_json(self) -> str:
        return json.dumps(
            {"environment": self.environment, "rows": [r.to_dict() for r in self.rows]},
            indent=2,
        )

    def render_text(self) -> str:
        """Plain-text tables, one block per query, in the style of the
        strategy/time/result-count performance tables."""
        lines: list[str] = [f"Environment: {self.environment}", ""]
        by_query: dict[tuple[str, str], list[BenchRow]] = {}
        for row in self.rows:
            by_query.setdefault((row.theme, row.place), []).append(row)
        for qn, ((theme, place), rows) in enumerate(by_query.items(), start=1):
            lines.append(f'Query Terms: "{theme} {place}" (Q{qn})')
            lines.append(f"{'Strategy':<18} {'Time (ms)':>10} {'Number of results':>19}")
            for row in rows:
                label = strategy_spec(row.strategy).label
                if row.error:
                    lines.append(f"{label:<18} {'-':>10} {'ERROR: ' + row.error:>19}")
                else:
                    lines.append(
                        f"{label:<18} {row.elapsed_ms:>10.0f} {row.result_count:>19}"
                    )
            lines.append("")
        return "\n".join(lines)


def describe_environment() -> str:
    return (
        f"{platform.platform()}; python {platform.python_version()}; "
        f"{platform.processor() or platform.machine()}"
    )


def run_benchmark(
    queries: Sequence[SearchQuery],
    strategies: Sequence[StrategyId | str],
    engine: SearchEngine,
) -> BenchReport:
    """Execute every (strategy, query) pair once, capturing failures per row."""
    if not strategies:
        strategies = [spec.id for spec in strategy_catalog()]
    rows: list[BenchRow] = []
    for query in queries:
        for strategy in strategies:
            sid = strategy.value if isinstance(strategy, StrategyId) else str(strategy)
            try:
                results, elapsed_ms = engine.run(query, strategy)
                rows.append(
                    BenchRow(
                        strategy=sid,
                        theme=query.theme,
                        place=query.place,
                        elapsed_ms=elapsed_ms,
                        result_count=len(results),
                    )
                )
            except Exception as exc:  # per-row capture: the run continues
                rows.append(
                    BenchRow(
                        strategy=sid,
                        theme=query.theme,
                        place=query.place,
                        elapsed_ms=0.0,
                        result_count=0,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return BenchReport(rows=rows, environment=describe_environment())
