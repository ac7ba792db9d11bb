"""HTTP service: search, strategy catalog, study tasks, rating collection.

Ratings are persisted to an append-only JSON-lines log; the export endpoint
materializes the latest value per (session, task, position) into the
evaluation kit's CSV schema so analysis round-trips losslessly.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .corpus import DatasetRecord, read_corpus
from .enhance import load_gazetteer
from .engine import SearchEngine, SearchQuery, StrategyId, strategy_catalog
from .errors import PlaceNotFoundError, UnknownStrategyError
from .evalkit import RATINGS_HEADER, RatingRecord
from .expand import ConceptNetClient, ExpansionSources, load_thesaurus
from .textindex import build_index

log = logging.getLogger(__name__)

DEFAULT_K = 7


@dataclass(frozen=True)
class StudyTask:
    task_id: str
    topic: str
    theme_keyword: str
    place_keyword: str
    strategy: str
    results_to_rate: int = DEFAULT_K
    query_id: str = ""

    def __post_init__(self):
        if not self.task_id or not self.theme_keyword or not self.place_keyword:
            raise ValueError("task_id and both keywords must be non-empty")
        if self.results_to_rate < 1:
            raise ValueError("results_to_rate must be >= 1")
        if not self.query_id:
            object.__setattr__(self, "query_id", self.task_id)

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "query_id": self.query_id,
            "topic": self.topic,
            "theme_keyword": self.theme_keyword,
            "place_keyword": self.place_keyword,
            "strategy": self.strategy,
            "results_to_rate": self.results_to_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StudyTask":
        return cls(
            task_id=d["task_id"],
            topic=d.get("topic", ""),
            theme_keyword=d["theme_keyword"],
            place_keyword=d["place_keyword"],
            strategy=d["strategy"],
            results_to_rate=int(d.get("results_to_rate", DEFAULT_K)),
            query_id=d.get("query_id", ""),
        )


def load_tasks(path: str | Path) -> list[StudyTask]:
    return [
        StudyTask.from_dict(item)
        for item in json.loads(Path(path).read_text(encoding="utf-8"))
    ]


def default_tasks() -> list[StudyTask]:
    """The scripted study: the four queries under each non-slow strategy."""
    topics = [
        ("q1", "the population of England", "Population", "England"),
        ("q2", "learning in Wales", "Learning", "Wales"),
        ("q3", "transport in Fairfax", "Transport", "Fairfax"),
        ("q4", "communities in the Republic of Ireland", "Communities", "Republic of Ireland"),
    ]
    tasks = []
    for spec in strategy_catalog():
        if spec.slow:
            continue
        for query_id, topic, theme, place in topics:
            tasks.append(
                StudyTask(
                    task_id=f"{query_id}-{spec.id.value}",
                    query_id=query_id,
                    topic=topic,
                    theme_keyword=theme,
                    place_keyword=place,
                    strategy=spec.id.value,
                )
            )
    # scripted order: per strategy, queries in order (no randomization)
    return tasks


class RatingStore:
    """Durable append-only log of sessions and ratings.

    Each line is {"kind": "session"|"rating", ...}. Replaying the log rebuilds
    the in-memory state, so a restart loses nothing; duplicate positions are
    materialized last-write-wins at export time.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.sessions: set[str] = set()
        self.ratings: dict[tuple[str, str, int], dict] = {}
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                if entry.get("kind") == "session":
                    self.sessions.add(entry["session_id"])
                elif entry.get("kind") == "rating":
                    key = (entry["session_id"], entry["task_id"], entry["position"])
                    self.ratings[key] = entry

    def _append(self, entry: dict) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True))
            fh.write("\n")

    def create_session(self) -> str:
        session_id = uuid.uuid4().hex
        with self._lock:
            self._append({"kind": "session", "session_id": session_id, "ts": time.time()})
            self.sessions.add(session_id)
        return session_id

    def has_session(self, session_id: str) -> bool:
        return session_id in self.sessions

    def add_rating(
        self, session_id: str, task_id: str, position: int, dataset_id: str, stars: int
    ) -> None:
        entry = {
            "kind": "rating",
            "session_id": session_id,
            "task_id": task_id,
            "position": position,
            "dataset_id": dataset_id,
            "stars": stars,
            "ts": time.time(),
        }
        with self._lock:
            self._append(entry)
            self.ratings[(session_id, task_id, position)] = entry

    def export_records(self, tasks_by_id: dict[str, StudyTask]) -> list[RatingRecord]:
        with self._lock:
            snapshot = list(self.ratings.values())
        records = []
        for entry in sorted(
            snapshot, key=lambda e: (e["session_id"], e["task_id"], e["position"])
        ):
            task = tasks_by_id.get(entry["task_id"])
            if task is None:
                continue
            records.append(
                RatingRecord(
                    user_id=entry["session_id"],
                    query_id=task.query_id,
                    strategy=task.strategy,
                    position=entry["position"],
                    dataset_id=entry["dataset_id"],
                    stars=entry["stars"],
                )
            )
        return records


@dataclass
class AppConfig:
    corpus_path: str | Path
    gazetteer_path: str | Path
    thesaurus_path: str | Path | None = None
    conceptnet_cache: str | Path | None = None
    conceptnet_api: str | None = None
    tasks_path: str | Path | None = None
    ratings_log: str | Path = "ratings.log.jsonl"
    frontend_dir: str | Path | None = None
    default_k: int = DEFAULT_K


class RatingSubmission(BaseModel):
    session_id: str
    task_id: str
    position: int
    dataset_id: str
    stars: int


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _result_payload(result, record: DatasetRecord | None) -> dict:
    return {
        "rank": result.rank,
        "dataset_id": result.dataset_id,
        "title": record.title if record else "",
        "description": record.description if record else "",
        "portal": record.portal if record else "",
        "text_score": result.text_score,
        "spatial_score": result.spatial_score.raw if result.spatial_score else None,
        "n_text": result.n_text,
        "n_spatial": result.n_spatial,
        "aggregate": result.aggregate,
    }


def create_app(config: AppConfig) -> FastAPI:
    records = {r.id: r for r in read_corpus(config.corpus_path)}
    gazetteer = load_gazetteer(config.gazetteer_path)
    thesaurus = load_thesaurus(config.thesaurus_path) if config.thesaurus_path else None
    conceptnet = None
    if config.conceptnet_cache:
        conceptnet = ConceptNetClient(
            cache_dir=config.conceptnet_cache,
            api_base=config.conceptnet_api or "https://api.conceptnet.io",
            offline=config.conceptnet_api is None,
        )
    engine = SearchEngine(
        index=build_index(records.values()),
        gazetteer=gazetteer,
        sources=ExpansionSources(thesaurus=thesaurus, conceptnet=conceptnet),
    )
    if config.tasks_path:
        tasks = load_tasks(config.tasks_path)
    else:
        tasks = default_tasks()
    tasks_by_id = {t.task_id: t for t in tasks}
    store = RatingStore(config.ratings_log)

    app = FastAPI(title="ogdsearch", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.engine = engine
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "message": exc.message}
        )

    @app.get("/api/strategies")
    def get_strategies():
        return [
            {
                "id": spec.id.value,
                "label": spec.label,
                "description": spec.description,
                "uses_expansion": spec.uses_expansion,
                "mode": spec.mode.value if spec.mode else None,
                "similarity": spec.similarity.value,
                "source": spec.source.value,
                "slow": spec.slow,
            }
            for spec in strategy_catalog()
        ]

    @app.get("/api/search")
    def search(theme: str = "", place: str = "", strategy: str = "", k: int = 0):
        if not theme or not place or not strategy:
            raise ApiError(400, "MISSING_PARAM", "theme, place and strategy are required")
        try:
            sid = StrategyId.parse(strategy)
        except UnknownStrategyError as exc:
            raise ApiError(400, "UNKNOWN_STRATEGY", str(exc))
        try:
            results, elapsed_ms = engine.run(SearchQuery(theme, place), sid)
        except PlaceNotFoundError as exc:
            raise ApiError(404, "PLACE_NOT_FOUND", str(exc))
        top_k = k if k > 0 else config.default_k
        return {
            "strategy": sid.value,
            "theme": theme,
            "place": place,
            "elapsed_ms": elapsed_ms,
            "total_results": len(results),
            "results": [
                _result_payload(r, records.get(r.dataset_id)) for r in results[:top_k]
            ],
        }

    @app.get("/api/tasks")
    def get_tasks():
        return [t.to_dict() for t in tasks]

    @app.post("/api/sessions", status_code=201)
    def create_session():
        return {"session_id": store.create_session()}

    @app.post("/api/ratings", status_code=201)
    def post_rating(submission: RatingSubmission):
        if not store.has_session(submission.session_id):
            raise ApiError(404, "UNKNOWN_SESSION", f"no session {submission.session_id!r}")
        task = tasks_by_id.get(submission.task_id)
        if task is None:
            raise ApiError(404, "UNKNOWN_TASK", f"no task {submission.task_id!r}")
        if not (0 <= submission.stars <= 5):
            raise ApiError(400, "INVALID_STARS", f"stars must be 0..5, got {submission.stars}")
        if not (1 <= submission.position <= task.results_to_rate):
            raise ApiError(
                400,
                "INVALID_POSITION",
                f"position must be 1..{task.results_to_rate}, got {submission.position}",
            )
        store.add_rating(
            submission.session_id,
            submission.task_id,
            submission.position,
            submission.dataset_id,
            submission.stars,
        )
        return {"status": "recorded"}

    @app.get("/api/export/ratings.csv")
    def export_ratings():
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(RATINGS_HEADER)
        for rec in store.export_records(tasks_by_id):
            writer.writerow(
                [rec.user_id, rec.query_id, rec.strategy, rec.position, rec.dataset_id, rec.stars]
            )
        return PlainTextResponse(buffer.getvalue(), media_type="text/csv")

    if config.frontend_dir and Path(config.frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.frontend_dir, html=True), name="ui")

    return app
