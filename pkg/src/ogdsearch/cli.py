"""Command-line interface: harvest, enhance, index, search, bench, eval-*, serve."""

from __future__ import annotations

import concurrent.futures
import json
import logging
import sys
from pathlib import Path

import click

from .corpus import PortalSource, fetch_resource, harvest_portal, read_corpus, write_corpus
from .enhance import RemoteGeocoder, enhance, load_gazetteer
from .engine import SearchEngine, SearchQuery, StrategyId, strategy_catalog
from .errors import OgdSearchError
from .evalkit import (
    DEFAULT_QUERIES,
    borda,
    cv_global_average,
    cv_row_averages,
    cv_table,
    mean_dcg,
    read_ratings_csv,
    run_benchmark,
)
from .expand import ConceptNetClient, ExpansionSources, load_thesaurus
from .textindex import FieldWeights, build_index, load_index, save_index

log = logging.getLogger(__name__)

RESOURCE_SIZE_CAP = 20 * 1024 * 1024  # bytes


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Spatial search over open-government dataset metadata."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--portal", required=True, help="CKAN portal base URL.")
@click.option("--country", default="", help="ISO country hint for the portal.")
@click.option("--fixtures", type=click.Path(exists=True), default=None,
              help="Directory of saved page_{offset}.json responses (offline mode).")
@click.option("--format", "format_filter", default="GEOJSON", show_default=True)
@click.option("--page-size", default=100, show_default=True)
@click.option("--max-records", default=1000, show_default=True)
@click.option("--corpus", required=True, type=click.Path(), help="Output corpus file.")
def harvest(portal, country, fixtures, format_filter, page_size, max_records, corpus):
    """Harvest dataset metadata from a CKAN portal into a corpus file."""
    source = PortalSource(
        base_url=portal, country_hint=country, page_size=page_size, max_records=max_records
    )
    records = harvest_portal(source, format_filter, fixture_dir=fixtures)
    count = write_corpus(records, corpus)
    click.echo(f"wrote {count} records to {corpus}")


@main.command(name="enhance")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--gazetteer", required=True, type=click.Path(exists=True))
@click.option("--country", default=None, help="Country hint overriding the portal URL.")
@click.option("--geocoder-url", default=None, help="Remote geocoder search endpoint.")
@click.option("--geocoder-cache", type=click.Path(), default=".geocoder-cache")
@click.option("--fetch-geojson/--no-fetch-geojson", default=True, show_default=True,
              help="Fetch GeoJSON resources for the envelope tier.")
@click.option("--workers", default=4, show_default=True, help="Parallel resource fetches.")
def enhance_cmd(corpus, out, gazetteer, country, geocoder_url, geocoder_cache,
                fetch_geojson, workers):
    """Assign bounding boxes through the three-tier enhancement cascade."""
    records = read_corpus(corpus)
    entries = load_gazetteer(gazetteer)
    remote = RemoteGeocoder(geocoder_url, geocoder_cache) if geocoder_url else None

    geojson_bodies: dict[str, bytes] = {}
    if fetch_geojson:
        targets = [
            (rec.id, url)
            for rec in records
            if rec.bbox is None
            for url, fmt in rec.resource_urls[:1]
            if fmt == "GEOJSON"
        ]
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(fetch_resource, url, RESOURCE_SIZE_CAP): rec_id
                for rec_id, url in targets
            }
            for future in concurrent.futures.as_completed(futures):
                rec_id = futures[future]
                try:
                    geojson_bodies[rec_id] = future.result()
                except OgdSearchError as exc:
                    log.debug("resource fetch failed for %s: %s", rec_id, exc)

    enhanced = [
        enhance(rec, geojson_bodies.get(rec.id), entries, remote, country)
        for rec in records
    ]
    count = write_corpus(enhanced, out)
    with_bbox = sum(1 for r in enhanced if r.bbox is not None)
    click.echo(f"wrote {count} records to {out} ({with_bbox} with bbox)")


@main.command(name="index")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--weight-a", default=1.0, show_default=True)
@click.option("--weight-b", default=0.4, show_default=True)
def index_cmd(corpus, out, weight_a, weight_b):
    """Build and serialize the text index."""
    records = read_corpus(corpus)
    index = build_index(records, FieldWeights(weight_a, weight_b))
    save_index(index, out)
    click.echo(f"indexed {len(index)} documents into {out}")


def _make_engine(corpus, index_file, gazetteer, thesaurus, conceptnet_cache, conceptnet_api):
    if index_file:
        index = load_index(index_file)
    elif corpus:
        index = build_index(read_corpus(corpus))
    else:
        raise click.UsageError("either --corpus or --index is required")
    entries = load_gazetteer(gazetteer) if gazetteer else []
    sources = ExpansionSources(
        thesaurus=load_thesaurus(thesaurus) if thesaurus else None,
        conceptnet=ConceptNetClient(
            cache_dir=conceptnet_cache,
            api_base=conceptnet_api or "https://api.conceptnet.io",
            offline=conceptnet_api is None,
        )
        if conceptnet_cache
        else None,
    )
    return SearchEngine(index=index, gazetteer=entries, sources=sources)


_engine_options = [
    click.option("--corpus", type=click.Path(exists=True), default=None),
    click.option("--index", "index_file", type=click.Path(exists=True), default=None),
    click.option("--gazetteer", type=click.Path(exists=True), default=None),
    click.option("--thesaurus", type=click.Path(exists=True), default=None),
    click.option("--conceptnet-cache", type=click.Path(), default=None),
    click.option("--conceptnet-api", default=None,
                 help="ConceptNet API base; omit to stay offline (cache only)."),
]


def _with_engine_options(fn):
    for option in reversed(_engine_options):
        fn = option(fn)
    return fn


@main.command()
@_with_engine_options
@click.option("--strategy", required=True)
@click.option("--theme", required=True)
@click.option("--place", required=True)
@click.option("--k", default=7, show_default=True)
def search(corpus, index_file, gazetteer, thesaurus, conceptnet_cache, conceptnet_api,
           strategy, theme, place, k):
    """Run one query under one strategy and print the top-k results."""
    engine = _make_engine(corpus, index_file, gazetteer, thesaurus,
                          conceptnet_cache, conceptnet_api)
    sid = StrategyId.parse(strategy)
    try:
        results, elapsed_ms = engine.run(SearchQuery(theme, place), sid)
    except OgdSearchError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{len(results)} results in {elapsed_ms:.0f} ms ({sid.value})")
    for result in results[:k]:
        click.echo(
            f"{result.rank:>3}. {result.dataset_id}  "
            f"score={result.aggregate:.4f} "
            f"(text={result.n_text:.3f}, "
            f"spatial={'-' if result.n_spatial is None else f'{result.n_spatial:.3f}'})"
        )


@main.command()
@_with_engine_options
@click.option("--report", type=click.Path(), default=None, help="Write the JSON report here.")
@click.option("--strategy", "strategies", multiple=True,
              help="Restrict to specific strategies (default: all 11).")
def bench(corpus, index_file, gazetteer, thesaurus, conceptnet_cache, conceptnet_api,
          report, strategies):
    """Benchmark strategies x queries; prints a per-query table."""
    engine = _make_engine(corpus, index_file, gazetteer, thesaurus,
                          conceptnet_cache, conceptnet_api)
    chosen = [StrategyId.parse(s) for s in strategies] or [s.id for s in strategy_catalog()]
    queries = [query for _qid, query in DEFAULT_QUERIES]
    bench_report = run_benchmark(queries, chosen, engine)
    click.echo(bench_report.render_text())
    errors = [r for r in bench_report.rows if r.error]
    if report:
        Path(report).write_text(bench_report.to_json(), encoding="utf-8")
        click.echo(f"report written to {report}")
    if errors:
        click.echo(f"{len(errors)} rows failed", err=True)
        sys.exit(1)


@main.command(name="eval-dcg")
@click.option("--ratings", required=True, type=click.Path(exists=True))
@click.option("--p", default=7, show_default=True)
def eval_dcg(ratings, p):
    """Mean DCG per (strategy, query) from a ratings CSV."""
    table = mean_dcg(read_ratings_csv(ratings), p=p)
    strategies = sorted({s for s, _q in table.values})
    queries = sorted({q for _s, q in table.values})
    click.echo("strategy".ljust(18) + "".join(q.rjust(10) for q in queries))
    for s in strategies:
        cells = [
            f"{table.values[(s, q)]:.2f}" if (s, q) in table.values else "-"
            for q in queries
        ]
        click.echo(s.ljust(18) + "".join(c.rjust(10) for c in cells))


@main.command(name="eval-borda")
@click.option("--ratings", required=True, type=click.Path(exists=True))
@click.option("--p", default=7, show_default=True)
def eval_borda(ratings, p):
    """Borda totals over the mean-DCG table."""
    table = mean_dcg(read_ratings_csv(ratings), p=p)
    strategies = sorted({s for s, _q in table.values})
    queries = sorted({q for _s, q in table.values})
    totals = borda(table, strategies, queries)
    for s, score in sorted(totals.items(), key=lambda kv: -kv[1]):
        click.echo(f"{s.ljust(18)} {score}")


@main.command(name="eval-cv")
@click.option("--ratings", required=True, type=click.Path(exists=True))
@click.option("--p", default=7, show_default=True)
def eval_cv(ratings, p):
    """Coefficients of variation of per-user DCGs, plus the global average."""
    table = mean_dcg(read_ratings_csv(ratings), p=p)
    strategies = sorted({s for s, _q in table.values})
    queries = sorted({q for _s, q in table.values})
    cells = cv_table(table, strategies, queries)
    rows = cv_row_averages(cells, strategies, queries)
    click.echo("strategy".ljust(18) + "".join(q.rjust(10) for q in queries) + " avg".rjust(10))
    for s in strategies:
        line = [f"{cells[(s, q)]:.2f}" if (s, q) in cells else "-" for q in queries]
        avg = f"{rows[s]:.2f}%" if s in rows else "-"
        click.echo(s.ljust(18) + "".join(c.rjust(10) for c in line) + avg.rjust(11))
    if rows:
        click.echo(f"global average (mean of row averages): {cv_global_average(rows):.1f}%")


@main.command()
@_with_engine_options
@click.option("--tasks", type=click.Path(exists=True), default=None)
@click.option("--ratings", "ratings_log", type=click.Path(), default="ratings.log.jsonl",
              show_default=True)
@click.option("--frontend", type=click.Path(), default=None,
              help="Directory of built UI assets to serve at /.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(corpus, index_file, gazetteer, thesaurus, conceptnet_cache, conceptnet_api,
          tasks, ratings_log, frontend, host, port):
    """Serve the HTTP API (and, optionally, the rating UI)."""
    import uvicorn

    from .api import AppConfig, create_app

    if not corpus:
        raise click.UsageError("--corpus is required for serve")
    if not gazetteer:
        raise click.UsageError("--gazetteer is required for serve")
    app = create_app(
        AppConfig(
            corpus_path=corpus,
            gazetteer_path=gazetteer,
            thesaurus_path=thesaurus,
            conceptnet_cache=conceptnet_cache,
            conceptnet_api=conceptnet_api,
            tasks_path=tasks,
            ratings_log=ratings_log,
            frontend_dir=frontend,
        )
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
