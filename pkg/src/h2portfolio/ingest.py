"""Convert a raw input directory into a scenario file.

Expected layout (documented in docs/scenario_schema.md):

    raw/
      sites.csv     site_id + per-site numeric parameters, one row per site
      series.csv    hour,dam_buy,dam_sell,wind_cf,pv_cf,physical_ppa_mw,virtual_ppa_mw
      market.json   scalar prices, contract terms, and policy parameters
      ppa_split.csv optional per-site PPA shares: hour,site_id,physical_mw,virtual_mw

All numbers pass through float() untouched, so the conversion is lossless.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .domain import (
    CaseConfig,
    ContractTerms,
    ElectrolyzerSpec,
    MarketPrices,
    PolicyConfig,
    PpaSplit,
    RenewableSpec,
    ScenarioConfig,
    Scope,
    SiteSpec,
    StorageSpec,
    TimeGrid,
)
from .scenario_io import ScenarioFormatError

SITE_COLUMNS = (
    "site_id", "efficiency", "capacity_mw", "flexibility_rate",
    "wind_capacity_mw", "pv_capacity_mw",
    "charge_efficiency", "discharge_efficiency", "max_charge_mw", "max_discharge_mw",
    "energy_min_mwh", "energy_max_mwh", "grid_limit_mw",
)
SERIES_COLUMNS = (
    "hour", "dam_buy", "dam_sell", "wind_cf", "pv_cf", "physical_ppa_mw", "virtual_ppa_mw",
)
MARKET_KEYS = (
    "physical_ppa_price", "virtual_ppa_strike", "grid_access_tariff", "loss_rate",
    "bundled_h2", "unbundled_h2", "go_sell", "go_buy",
    "green_share", "go_conversion", "go_buy_cap", "go_sell_cap",
)


def ingest_raw(raw_dir) -> ScenarioConfig:
    raw = Path(raw_dir)
    if not raw.is_dir():
        raise ScenarioFormatError(str(raw), "raw input directory not found")

    site_rows = _read_table(raw / "sites.csv", SITE_COLUMNS)
    series_rows = _read_table(raw / "series.csv", SERIES_COLUMNS)
    market = _read_market(raw / "market.json")

    T = len(series_rows)
    if T == 0:
        raise ScenarioFormatError("series.csv", "no data rows")
    for i, row in enumerate(series_rows):
        if int(float(row["hour"])) != i:
            raise ScenarioFormatError("series.csv:hour", f"row {i}: hour {row['hour']} out of order")

    sites = []
    for i, row in enumerate(site_rows):
        p = f"sites.csv row {i}"
        num = lambda col: _float(row[col], f"{p}:{col}")  # noqa: E731
        sites.append(SiteSpec(
            site_id=row["site_id"],
            electrolyzer=ElectrolyzerSpec(num("efficiency"), num("capacity_mw"),
                                          num("flexibility_rate")),
            renewables=RenewableSpec(num("wind_capacity_mw"), num("pv_capacity_mw")),
            storage=StorageSpec(num("charge_efficiency"), num("discharge_efficiency"),
                                num("max_charge_mw"), num("max_discharge_mw"),
                                num("energy_min_mwh"), num("energy_max_mwh")),
            grid_limit_mw=num("grid_limit_mw"),
        ))
    if not sites:
        raise ScenarioFormatError("sites.csv", "no data rows")

    col = lambda name: tuple(_float(row[name], f"series.csv:{name}") for row in series_rows)  # noqa: E731
    contracts = ContractTerms(
        physical_ppa_price=market["physical_ppa_price"],
        virtual_ppa_strike=market["virtual_ppa_strike"],
        grid_access_tariff=market["grid_access_tariff"],
        loss_rate=market["loss_rate"],
        physical_ppa_profile=col("physical_ppa_mw"),
        virtual_ppa_profile=col("virtual_ppa_mw"),
    )
    prices = MarketPrices(
        dam_buy=col("dam_buy"),
        dam_sell=col("dam_sell"),
        bundled_h2=market["bundled_h2"],
        unbundled_h2=market["unbundled_h2"],
        go_sell=market["go_sell"],
        go_buy=market["go_buy"],
    )
    policy = PolicyConfig(
        green_share=market["green_share"],
        go_conversion=market["go_conversion"],
        go_buy_cap=market["go_buy_cap"],
        go_sell_cap=market["go_sell_cap"],
        wind_cf=col("wind_cf"),
        pv_cf=col("pv_cf"),
    )

    split = _read_split(raw / "ppa_split.csv", [s.site_id for s in sites], T)
    case = CaseConfig(Scope.PORTFOLIO, Scope.PORTFOLIO, split)
    step_hours = float(market.get("step_hours", 1.0))
    return ScenarioConfig(TimeGrid(T, step_hours), tuple(sites), contracts, prices, policy, case)


def _read_table(path: Path, required: tuple[str, ...]) -> list[dict[str, str]]:
    if not path.exists():
        raise ScenarioFormatError(path.name, "file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for column in required:
            if column not in fields:
                raise ScenarioFormatError(f"{path.name}:{column}", "missing column")
        return list(reader)


def _read_market(path: Path) -> dict[str, float]:
    if not path.exists():
        raise ScenarioFormatError(path.name, "file not found")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(path.name, f"not valid JSON ({exc})") from exc
    out: dict[str, float] = {}
    for key in MARKET_KEYS:
        if key not in doc:
            raise ScenarioFormatError(f"{path.name}:{key}", "missing key")
        out[key] = _float(doc[key], f"{path.name}:{key}")
    if "step_hours" in doc:
        out["step_hours"] = _float(doc["step_hours"], f"{path.name}:step_hours")
    return out


def _read_split(path: Path, site_ids: list[str], T: int) -> dict[str, PpaSplit] | None:
    if not path.exists():
        return None
    rows = _read_table(path, ("hour", "site_id", "physical_mw", "virtual_mw"))
    physical = {sid: [0.0] * T for sid in site_ids}
    virtual = {sid: [0.0] * T for sid in site_ids}
    for i, row in enumerate(rows):
        sid = row["site_id"]
        if sid not in physical:
            raise ScenarioFormatError(f"{path.name}:site_id", f"row {i}: unknown site {sid!r}")
        hour = int(_float(row["hour"], f"{path.name}:hour"))
        if not 0 <= hour < T:
            raise ScenarioFormatError(f"{path.name}:hour", f"row {i}: hour {hour} outside horizon")
        physical[sid][hour] = _float(row["physical_mw"], f"{path.name}:physical_mw")
        virtual[sid][hour] = _float(row["virtual_mw"], f"{path.name}:virtual_mw")
    return {sid: PpaSplit(tuple(physical[sid]), tuple(virtual[sid])) for sid in site_ids}


def _float(value, field: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ScenarioFormatError(field, f"not a number: {value!r}") from None
