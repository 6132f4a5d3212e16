"""Scenario (de)serialization.

A scenario file is one JSON document mirroring
:class:`~h2portfolio.domain.ScenarioConfig` field for field; the exact
layout is documented in ``docs/scenario_schema.md``.  Hourly series are
JSON arrays, or ``{"csv": "relative/path.csv"}`` pointing at a two-column
``hour,value`` file resolved against the scenario file's directory.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Mapping

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


class ScenarioFormatError(ValueError):
    """Structurally broken scenario input; `field` names the first offender."""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioFormatError(str(path), f"cannot read scenario file ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(str(path), f"not valid JSON ({exc})") from exc
    return scenario_from_dict(doc, base_dir=path.parent)


def save_scenario(cfg: ScenarioConfig, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(scenario_to_dict(cfg), indent=2) + "\n", encoding="utf-8")
    return path


def scenario_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "grid": {"step_count": cfg.grid.step_count, "step_hours": cfg.grid.step_hours},
        "sites": [
            {
                "site_id": s.site_id,
                "electrolyzer": {
                    "efficiency": s.electrolyzer.efficiency,
                    "capacity_mw": s.electrolyzer.capacity_mw,
                    "flexibility_rate": s.electrolyzer.flexibility_rate,
                },
                "renewables": {
                    "wind_capacity_mw": s.renewables.wind_capacity_mw,
                    "pv_capacity_mw": s.renewables.pv_capacity_mw,
                },
                "storage": {
                    "charge_efficiency": s.storage.charge_efficiency,
                    "discharge_efficiency": s.storage.discharge_efficiency,
                    "max_charge_mw": s.storage.max_charge_mw,
                    "max_discharge_mw": s.storage.max_discharge_mw,
                    "energy_min_mwh": s.storage.energy_min_mwh,
                    "energy_max_mwh": s.storage.energy_max_mwh,
                },
                "grid_limit_mw": s.grid_limit_mw,
            }
            for s in cfg.sites
        ],
        "contracts": {
            "physical_ppa_price": cfg.contracts.physical_ppa_price,
            "virtual_ppa_strike": cfg.contracts.virtual_ppa_strike,
            "grid_access_tariff": cfg.contracts.grid_access_tariff,
            "loss_rate": cfg.contracts.loss_rate,
            "physical_ppa_profile": list(cfg.contracts.physical_ppa_profile),
            "virtual_ppa_profile": list(cfg.contracts.virtual_ppa_profile),
        },
        "prices": {
            "dam_buy": list(cfg.prices.dam_buy),
            "dam_sell": list(cfg.prices.dam_sell),
            "bundled_h2": cfg.prices.bundled_h2,
            "unbundled_h2": cfg.prices.unbundled_h2,
            "go_sell": cfg.prices.go_sell,
            "go_buy": cfg.prices.go_buy,
        },
        "policy": {
            "green_share": cfg.policy.green_share,
            "go_conversion": cfg.policy.go_conversion,
            "go_buy_cap": cfg.policy.go_buy_cap,
            "go_sell_cap": cfg.policy.go_sell_cap,
            "wind_cf": list(cfg.policy.wind_cf),
            "pv_cf": list(cfg.policy.pv_cf),
        },
        "case": {
            "ppa_scope": cfg.case.ppa_scope.value,
            "green_target_scope": cfg.case.green_target_scope.value,
            "per_site_ppa_profiles": None if cfg.case.per_site_ppa_profiles is None else {
                sid: {"physical": list(pair.physical), "virtual": list(pair.virtual)}
                for sid, pair in cfg.case.per_site_ppa_profiles.items()
            },
        },
    }
    return doc


def scenario_from_dict(doc: Mapping[str, Any], base_dir: Path | None = None) -> ScenarioConfig:
    grid_doc = _section(doc, "grid")
    grid = TimeGrid(
        step_count=_intval(grid_doc, "grid.step_count", "step_count"),
        step_hours=_num(grid_doc, "grid.step_hours", "step_hours", default=1.0),
    )

    sites_doc = doc.get("sites")
    if not isinstance(sites_doc, list) or not sites_doc:
        raise ScenarioFormatError("sites", "must be a non-empty array")
    sites = []
    for i, s in enumerate(sites_doc):
        p = f"sites[{i}]"
        if not isinstance(s, Mapping):
            raise ScenarioFormatError(p, "must be an object")
        el = _section(s, "electrolyzer", parent=p)
        rn = _section(s, "renewables", parent=p)
        st = _section(s, "storage", parent=p)
        sites.append(SiteSpec(
            site_id=str(_require(s, f"{p}.site_id", "site_id")),
            electrolyzer=ElectrolyzerSpec(
                efficiency=_num(el, f"{p}.electrolyzer.efficiency", "efficiency"),
                capacity_mw=_num(el, f"{p}.electrolyzer.capacity_mw", "capacity_mw"),
                flexibility_rate=_num(el, f"{p}.electrolyzer.flexibility_rate", "flexibility_rate"),
            ),
            renewables=RenewableSpec(
                wind_capacity_mw=_num(rn, f"{p}.renewables.wind_capacity_mw", "wind_capacity_mw"),
                pv_capacity_mw=_num(rn, f"{p}.renewables.pv_capacity_mw", "pv_capacity_mw"),
            ),
            storage=StorageSpec(
                charge_efficiency=_num(st, f"{p}.storage.charge_efficiency", "charge_efficiency"),
                discharge_efficiency=_num(st, f"{p}.storage.discharge_efficiency", "discharge_efficiency"),
                max_charge_mw=_num(st, f"{p}.storage.max_charge_mw", "max_charge_mw"),
                max_discharge_mw=_num(st, f"{p}.storage.max_discharge_mw", "max_discharge_mw"),
                energy_min_mwh=_num(st, f"{p}.storage.energy_min_mwh", "energy_min_mwh"),
                energy_max_mwh=_num(st, f"{p}.storage.energy_max_mwh", "energy_max_mwh"),
            ),
            grid_limit_mw=_num(s, f"{p}.grid_limit_mw", "grid_limit_mw"),
        ))

    ct = _section(doc, "contracts")
    contracts = ContractTerms(
        physical_ppa_price=_num(ct, "contracts.physical_ppa_price", "physical_ppa_price"),
        virtual_ppa_strike=_num(ct, "contracts.virtual_ppa_strike", "virtual_ppa_strike"),
        grid_access_tariff=_num(ct, "contracts.grid_access_tariff", "grid_access_tariff"),
        loss_rate=_num(ct, "contracts.loss_rate", "loss_rate"),
        physical_ppa_profile=_load_series(ct, "contracts.physical_ppa_profile",
                                          "physical_ppa_profile", base_dir),
        virtual_ppa_profile=_load_series(ct, "contracts.virtual_ppa_profile",
                                         "virtual_ppa_profile", base_dir),
    )

    pr = _section(doc, "prices")
    prices = MarketPrices(
        dam_buy=_load_series(pr, "prices.dam_buy", "dam_buy", base_dir),
        dam_sell=_load_series(pr, "prices.dam_sell", "dam_sell", base_dir),
        bundled_h2=_num(pr, "prices.bundled_h2", "bundled_h2"),
        unbundled_h2=_num(pr, "prices.unbundled_h2", "unbundled_h2"),
        go_sell=_num(pr, "prices.go_sell", "go_sell"),
        go_buy=_num(pr, "prices.go_buy", "go_buy"),
    )

    po = _section(doc, "policy")
    policy = PolicyConfig(
        green_share=_num(po, "policy.green_share", "green_share"),
        go_conversion=_num(po, "policy.go_conversion", "go_conversion"),
        go_buy_cap=_num(po, "policy.go_buy_cap", "go_buy_cap"),
        go_sell_cap=_num(po, "policy.go_sell_cap", "go_sell_cap"),
        wind_cf=_load_series(po, "policy.wind_cf", "wind_cf", base_dir),
        pv_cf=_load_series(po, "policy.pv_cf", "pv_cf", base_dir),
    )

    case_doc = doc.get("case") or {}
    case = CaseConfig(
        ppa_scope=_scope(case_doc, "case.ppa_scope", "ppa_scope", default="portfolio"),
        green_target_scope=_scope(case_doc, "case.green_target_scope",
                                  "green_target_scope", default="portfolio"),
        per_site_ppa_profiles=_load_split(case_doc.get("per_site_ppa_profiles"), base_dir),
    )
    return ScenarioConfig(grid, tuple(sites), contracts, prices, policy, case)


def _load_split(doc, base_dir) -> dict[str, PpaSplit] | None:
    if doc is None:
        return None
    if not isinstance(doc, Mapping):
        raise ScenarioFormatError("case.per_site_ppa_profiles", "must be an object or null")
    split = {}
    for sid, pair in doc.items():
        p = f"case.per_site_ppa_profiles[{sid}]"
        if not isinstance(pair, Mapping):
            raise ScenarioFormatError(p, "must be an object with physical/virtual series")
        split[str(sid)] = PpaSplit(
            physical=_load_series(pair, f"{p}.physical", "physical", base_dir),
            virtual=_load_series(pair, f"{p}.virtual", "virtual", base_dir),
        )
    return split


def _section(doc: Mapping, key: str, parent: str = "") -> Mapping:
    path = f"{parent}.{key}" if parent else key
    value = doc.get(key)
    if not isinstance(value, Mapping):
        raise ScenarioFormatError(path, "missing or not an object")
    return value


def _require(doc: Mapping, path: str, key: str):
    if key not in doc:
        raise ScenarioFormatError(path, "missing")
    return doc[key]


def _num(doc: Mapping, path: str, key: str, default: float | None = None) -> float:
    if key not in doc:
        if default is not None:
            return default
        raise ScenarioFormatError(path, "missing")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(path, f"must be a number, got {value!r}")
    return float(value)


def _intval(doc: Mapping, path: str, key: str) -> int:
    value = _require(doc, path, key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioFormatError(path, f"must be an integer, got {value!r}")
    return value


def _scope(doc: Mapping, path: str, key: str, default: str) -> Scope:
    raw = doc.get(key, default)
    try:
        return Scope(str(raw))
    except ValueError:
        raise ScenarioFormatError(path, f"must be 'per_site' or 'portfolio', got {raw!r}") from None


def _load_series(doc: Mapping, path: str, key: str, base_dir: Path | None) -> tuple[float, ...]:
    value = _require(doc, path, key)
    if isinstance(value, Mapping):
        ref = value.get("csv")
        if not isinstance(ref, str):
            raise ScenarioFormatError(path, "series object must carry a 'csv' path")
        csv_path = Path(ref)
        if not csv_path.is_absolute():
            csv_path = (base_dir or Path.cwd()) / csv_path
        return read_series_csv(csv_path, path)
    if not isinstance(value, list):
        raise ScenarioFormatError(path, "must be an array of numbers or {'csv': path}")
    out = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ScenarioFormatError(path, f"element {i} must be a number, got {x!r}")
        out.append(float(x))
    return tuple(out)


def read_series_csv(path: Path, field: str) -> tuple[float, ...]:
    """Read an hour,value series; hours must run 0..n-1 in order."""
    if not path.exists():
        raise ScenarioFormatError(field, f"series file not found: {path}")
    rows: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "hour" not in reader.fieldnames \
                or "value" not in reader.fieldnames:
            raise ScenarioFormatError(field, f"{path} must have columns hour,value")
        for i, row in enumerate(reader):
            try:
                hour = int(row["hour"])
                value = float(row["value"])
            except (TypeError, ValueError):
                raise ScenarioFormatError(field, f"{path} row {i}: bad hour/value") from None
            if hour != i:
                raise ScenarioFormatError(field, f"{path} row {i}: hour {hour} out of order")
            rows.append(value)
    return tuple(rows)
