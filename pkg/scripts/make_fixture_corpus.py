#!/usr/bin/env python3
"""Regenerate fixtures/corpus.jsonl and fixtures/tasks.json.

The corpus is hand-designed: each of the four standard queries has a cluster
of purpose-built records (baseline hits, spatial-only hits, records reachable
only via a synonym, a hypernym, or a hyponym expansion) plus topically inert
filler spread over several regions so spatial restriction has something to
chew on.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ogdsearch.api import default_tasks
from ogdsearch.corpus import DatasetRecord, Provenance, write_corpus
from ogdsearch.geo import BBox

UK = "https://data.gov.uk"
US = "https://catalog.data.gov"
IE = "https://data.gov.ie"

BOXES = {
    "england": BBox(-6.42, 1.77, 49.86, 55.81),
    "wales": BBox(-5.47, -2.65, 51.35, 53.43),
    "scotland": BBox(-7.66, -0.73, 54.63, 60.86),
    "fairfax": BBox(-77.54, -77.04, 38.60, 39.06),
    "ireland": BBox(-10.48, -5.99, 51.42, 55.39),
    "uk": BBox(-8.62, 1.77, 49.84, 60.86),
    "us": BBox(-124.85, -66.88, 24.40, 49.38),
    "london": BBox(-0.51, 0.33, 51.29, 51.69),
    "cardiff": BBox(-3.29, -3.07, 51.42, 51.56),
    "dublin": BBox(-6.45, -6.05, 53.22, 53.43),
    "germany": BBox(5.87, 15.04, 47.27, 55.06),
    "france": BBox(-5.14, 9.56, 41.33, 51.09),
}

GEOJSON = Provenance.GEOJSON_ENVELOPE
PLACE = Provenance.PLACE_NAME
COUNTRY = Provenance.PORTAL_COUNTRY
METADATA = Provenance.PORTAL_METADATA


def rec(rid, title, desc, tags, portal, box_key, prov, fmt="GEOJSON"):
    bbox = BOXES[box_key] if box_key else None
    return DatasetRecord(
        id=rid,
        title=title,
        description=desc,
        tags=tags,
        portal=portal,
        resource_urls=[(f"{portal}/ds/{rid}.geojson", fmt)],
        bbox=bbox,
        bbox_provenance=prov if bbox else Provenance.NONE,
    )


RECORDS = [
    # --- Q1 cluster: Population / England --------------------------------
    rec("uk-pop-density-england", "Population density of England 2011",
        "Usual resident population per square kilometre from the 2011 census.",
        ["population", "census"], UK, "england", PLACE),
    rec("uk-pop-projections", "Population projections for local authorities",
        "Projected counts by age band to 2041.", ["population"], UK, "england", PLACE),
    rec("uk-universe-sampling", "Universe sampling frame for household surveys",
        "Sampling universe used to draw household survey samples.",
        ["surveys"], UK, "england", GEOJSON),
    rec("uk-citizenry-index", "Citizenry wellbeing index",
        "Composite wellbeing indicator by district.", ["wellbeing"], UK, "england", GEOJSON),
    rec("uk-pop-estimates", "Mid-year population estimates",
        "National mid-year estimates.", ["population"], UK, "uk", COUNTRY),
    rec("us-pop-tracts", "Population by census tract",
        "Decennial counts by tract.", ["population", "census"], US, "fairfax", METADATA),

    # --- Q2 cluster: Learning / Wales -------------------------------------
    rec("uk-learning-16-19", "Learning provision for 16 to 19 year olds in Wales",
        "Further education and work-based learning enrolments.",
        ["education", "learning"], UK, "wales", PLACE),
    rec("uk-adult-learning-cardiff", "Adult learning centres",
        "Locations of adult learning centres in Cardiff.", ["learning"],
        UK, "cardiff", GEOJSON),
    rec("uk-land-acquisition", "Land acquisition records for Gwynedd",
        "Parcels acquired for public works.", ["land"], UK, "wales", PLACE),
    rec("uk-education-performance", "Education performance measures",
        "Key stage outcomes by school.", ["education"], UK, "wales", METADATA),
    rec("uk-study-centres", "Study centres directory",
        "Supervised study facilities directory.", ["facilities"], UK, "wales", METADATA),
    rec("uk-lifelong-learning", "Lifelong learning statistics",
        "Participation in adult education across the United Kingdom.",
        ["learning"], UK, "uk", COUNTRY),

    # --- Q3 cluster: Transport / Fairfax -----------------------------------
    rec("us-fairfax-transport-infra", "Transport infrastructure projects in Fairfax",
        "Capital projects for roads and bridges.", ["transport"], US, "fairfax", PLACE),
    rec("us-fairfax-public-transport", "Public transport routes",
        "Bus and rail service alignments.", ["transport", "bus"], US, "fairfax", GEOJSON),
    rec("us-fairfax-conveyance", "Conveyance and right of way permits",
        "Permits issued for conveyance of land.", ["permits"], US, "fairfax", METADATA),
    rec("us-fairfax-shipping", "Shipping manifests of the port authority",
        "Inbound and outbound shipping volumes.", ["freight"], US, "fairfax", METADATA),
    rec("us-fairfax-transit-stations", "Metro transit station entrances",
        "Station entrance points.", ["metro"], US, "fairfax", GEOJSON),

    # --- Q4 cluster: Communities / Republic of Ireland ---------------------
    rec("ie-community-gardens", "Community gardens in Dublin city",
        "Garden plots managed by community groups.", ["community"], IE, "dublin", GEOJSON),
    rec("ie-rural-communities", "Rural communities broadband rollout",
        "Premises passed by the national broadband plan.", ["broadband"],
        IE, "ireland", COUNTRY),
    rec("ie-residential-districts", "Residential district boundaries",
        "Administrative boundaries of residential districts.", ["boundaries"],
        IE, "dublin", GEOJSON),
    rec("ie-people-dublin", "People of Dublin census summary",
        "Headline counts for the city.", ["census"], IE, "dublin", PLACE),
    rec("ie-village-renewal", "Village renewal scheme grants",
        "Grants awarded under the village renewal scheme.", ["grants"],
        IE, "ireland", COUNTRY),
    rec("ie-water-quality", "River water quality monitoring stations",
        "Sampling stations on major rivers.", ["water"], IE, "ireland", COUNTRY),

    # --- filler: topically inert, spatially varied --------------------------
    rec("uk-london-air", "Air quality monitoring sites", "Hourly NO2 and PM10 readings.",
        ["environment"], UK, "london", GEOJSON),
    rec("uk-london-cycling", "Cycle hire docking stations", "Docking station locations.",
        ["cycling"], UK, "london", GEOJSON),
    rec("uk-london-budget", "Borough budget summaries", "Revenue budgets by borough.",
        ["finance"], UK, "london", PLACE),
    rec("uk-london-schools", "School capacity and places", "Planned admission numbers.",
        ["schools"], UK, "london", PLACE),
    rec("uk-london-crime", "Recorded crime by ward", "Monthly recorded offences.",
        ["crime"], UK, "london", PLACE),
    rec("uk-london-housing", "Housing completions", "New build completions by tenure.",
        ["housing"], UK, "london", PLACE),
    rec("uk-flood-zones", "Flood risk zones", "Indicative flood extents.",
        ["environment"], UK, "england", GEOJSON),
    rec("uk-forestry", "Woodland inventory", "National forest inventory plots.",
        ["forestry"], UK, "england", GEOJSON),
    rec("uk-libraries", "Public library locations", "Static library service points.",
        ["libraries"], UK, "england", PLACE),
    rec("uk-heritage", "Listed heritage sites", "Nationally listed buildings.",
        ["heritage"], UK, "england", PLACE),
    rec("uk-national-parks", "National park boundaries", "Designated landscape boundaries.",
        ["parks"], UK, "uk", COUNTRY),
    rec("uk-rail-usage", "Rail station usage", "Annual entries and exits by station.",
        ["rail"], UK, "uk", COUNTRY),
    rec("uk-energy", "Renewable energy installations", "Installed capacity by site.",
        ["energy"], UK, "uk", COUNTRY),
    rec("uk-broadband", "Broadband speed coverage", "Median download speeds.",
        ["broadband"], UK, "uk", COUNTRY),
    rec("uk-scotland-ferries", "Ferry routes and terminals", "Lifeline ferry services.",
        ["ferries"], UK, "scotland", PLACE),
    rec("uk-scotland-munros", "Munro summits", "Summits above 3000 feet.",
        ["recreation"], UK, "scotland", PLACE),
    rec("uk-scotland-fishing", "Fishing district statistics", "Landings by district.",
        ["fishing"], UK, "scotland", PLACE),
    rec("uk-wales-coastal", "Coastal path sections", "Alignment of the coastal path.",
        ["recreation"], UK, "wales", PLACE),
    rec("uk-wales-welsh-speakers", "Welsh speakers by area", "Census language statistics.",
        ["language"], UK, "wales", PLACE),
    rec("uk-wales-farms", "Agricultural holdings", "Farm counts by size band.",
        ["agriculture"], UK, "wales", PLACE),
    rec("ie-hedgerows", "Hedgerow survey", "Field boundary vegetation survey.",
        ["environment"], IE, "ireland", COUNTRY),
    rec("ie-planning", "Planning applications", "Applications lodged by county.",
        ["planning"], IE, "ireland", COUNTRY),
    rec("ie-heritage-sites", "National monuments", "Recorded monuments register.",
        ["heritage"], IE, "ireland", COUNTRY),
    rec("ie-dublin-bikes", "Bike share stations", "Station locations and capacity.",
        ["cycling"], IE, "dublin", GEOJSON),
    rec("us-fairfax-parcels", "Parcel boundaries", "Cadastral parcel fabric.",
        ["cadastre"], US, "fairfax", GEOJSON),
    rec("us-fairfax-zoning", "Zoning districts", "Zoning district polygons.",
        ["zoning"], US, "fairfax", GEOJSON),
    rec("us-fairfax-trails", "Trails and paths", "Multi-use trail network.",
        ["recreation"], US, "fairfax", GEOJSON),
    rec("us-airports", "Public use airports", "Airport reference points.",
        ["aviation"], US, "us", COUNTRY),
    rec("us-hospitals", "Hospital general information", "Registered facilities.",
        ["health"], US, "us", COUNTRY),
    rec("us-bridges", "National bridge inventory", "Bridge condition ratings.",
        ["infrastructure"], US, "us", COUNTRY),
    rec("us-wildfires", "Wildfire perimeters", "Historic fire perimeters.",
        ["hazards"], US, "us", COUNTRY),
    rec("de-stations", "Weather stations", "Station metadata for observations.",
        ["weather"], UK, "germany", METADATA),
    rec("de-rivers", "River gauge network", "Gauge station levels.",
        ["hydrology"], UK, "germany", METADATA),
    rec("fr-vineyards", "Vineyard register", "Declared vineyard parcels.",
        ["agriculture"], UK, "france", METADATA),
    rec("fr-monuments", "Historic monuments", "Protected monument sites.",
        ["heritage"], UK, "france", METADATA),
    rec("uk-hist-pop-tables", "Historic population tables",
        "Digitised population tables from early censuses.", ["population"],
        UK, None, None),
    rec("uk-archive-index", "Archive catalogue index", "Index of archival holdings.",
        ["archives"], UK, None, None),
    rec("ie-townlands-index", "Townland name index", "Gazetteer of townland names.",
        ["names"], IE, None, None),
]


def main():
    root = Path(__file__).resolve().parents[1]
    corpus_path = root / "fixtures" / "corpus.jsonl"
    count = write_corpus(RECORDS, corpus_path)
    print(f"wrote {count} records to {corpus_path}")

    tasks_path = root / "fixtures" / "tasks.json"
    tasks = [t.to_dict() for t in default_tasks()]
    tasks_path.write_text(json.dumps(tasks, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(tasks)} tasks to {tasks_path}")


if __name__ == "__main__":
    main()
