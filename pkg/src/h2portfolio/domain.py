"""Core data model for day-ahead scheduling of a hydrogen production portfolio.

A scenario bundles everything one optimization run needs: the hourly time
grid, the per-site asset fleet (electrolyzer, wind/PV, battery), contracted
PPA delivery profiles, market prices, and company policy (green-hydrogen
floor, certificate conversion factor, daily certificate trading caps).

Unit conventions, used consistently across the package:

    power           MW    (hourly series are rates, not energies)
    energy          MWh   (power * step_hours)
    hydrogen        kg per time step
    certificates    units (go_conversion units per MWh of renewable energy)
    money           EUR

All types are immutable after construction and safe to share between
concurrent solves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

Series = tuple[float, ...]


def _series(values: Iterable[float]) -> Series:
    return tuple(float(v) for v in values)


class Scope(Enum):
    """Where a constraint family is enforced: on each site or company-wide."""

    PER_SITE = "per_site"
    PORTFOLIO = "portfolio"


@dataclass(frozen=True)
class TimeGrid:
    """Scheduling horizon: `step_count` steps of `step_hours` hours each."""

    step_count: int
    step_hours: float = 1.0


@dataclass(frozen=True)
class ElectrolyzerSpec:
    """Electrolyzer stack: conversion efficiency, size, and flexibility.

    `efficiency` is kg of hydrogen per MWh of electricity.  `flexibility_rate`
    is the share of capacity that may be modulated; the remainder feeds a
    fixed downstream hydrogen demand every hour (see :func:`dsp_demand`).
    """

    efficiency: float
    capacity_mw: float
    flexibility_rate: float


@dataclass(frozen=True)
class RenewableSpec:
    """Installed on-site renewable capacity. Output is must-take."""

    wind_capacity_mw: float
    pv_capacity_mw: float


@dataclass(frozen=True)
class StorageSpec:
    """Battery storage co-located with the site's renewables.

    Rates are MW, energy bounds MWh. The state of charge starts and ends the
    day at 50% of `energy_max_mwh`, which must therefore lie inside the
    allowed energy band.
    """

    charge_efficiency: float
    discharge_efficiency: float
    max_charge_mw: float
    max_discharge_mw: float
    energy_min_mwh: float
    energy_max_mwh: float


@dataclass(frozen=True)
class SiteSpec:
    """One production site: electrolyzer + renewables + storage + grid tie.

    `grid_limit_mw` caps hourly market purchases and sales individually; it
    doubles as the coupling constant linking the buy/sell switching binaries
    to the traded power, so it must be positive and finite.
    """

    site_id: str
    electrolyzer: ElectrolyzerSpec
    renewables: RenewableSpec
    storage: StorageSpec
    grid_limit_mw: float


@dataclass(frozen=True)
class ContractTerms:
    """Portfolio-level PPA book.

    Both profiles are take-as-produced: the contracted MW per hour is an
    exogenous input the schedule must absorb, never a decision. The physical
    PPA delivers energy (priced at `physical_ppa_price` plus grid access and
    a loss markup); the virtual PPA is a pure financial hedge settled as a
    contract-for-difference against `virtual_ppa_strike`.
    """

    physical_ppa_price: float
    virtual_ppa_strike: float
    grid_access_tariff: float
    loss_rate: float
    physical_ppa_profile: Series
    virtual_ppa_profile: Series

    def __post_init__(self) -> None:
        object.__setattr__(self, "physical_ppa_profile", _series(self.physical_ppa_profile))
        object.__setattr__(self, "virtual_ppa_profile", _series(self.virtual_ppa_profile))


@dataclass(frozen=True)
class MarketPrices:
    """Market price inputs.

    Day-ahead electricity prices are hourly series (EUR/MWh); hydrogen
    (EUR/kg) and certificate (EUR/unit) prices are single daily scalars.
    """

    dam_buy: Series
    dam_sell: Series
    bundled_h2: float
    unbundled_h2: float
    go_sell: float
    go_buy: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "dam_buy", _series(self.dam_buy))
        object.__setattr__(self, "dam_sell", _series(self.dam_sell))


@dataclass(frozen=True)
class PolicyConfig:
    """Company policy and resource availability.

    `green_share` is the minimum fraction of daily hydrogen production that
    must be covered by retired certificates. `go_conversion` converts MWh of
    renewable electricity into certificate units. The caps limit total daily
    certificate purchases/sales. Capacity-factor series scale installed wind
    and PV capacity into must-take generation.
    """

    green_share: float
    go_conversion: float
    go_buy_cap: float
    go_sell_cap: float
    wind_cf: Series
    pv_cf: Series

    def __post_init__(self) -> None:
        object.__setattr__(self, "wind_cf", _series(self.wind_cf))
        object.__setattr__(self, "pv_cf", _series(self.pv_cf))


@dataclass(frozen=True)
class PpaSplit:
    """Per-site share of the contracted PPA profiles (MW per hour)."""

    physical: Series
    virtual: Series

    def __post_init__(self) -> None:
        object.__setattr__(self, "physical", _series(self.physical))
        object.__setattr__(self, "virtual", _series(self.virtual))


@dataclass(frozen=True)
class CaseConfig:
    """Compliance scoping: where PPA dispatch and the green floor bind.

    The three standard operating setups are:

        case 1: ppa_scope=PER_SITE,  green_target_scope=PER_SITE
        case 2: ppa_scope=PORTFOLIO, green_target_scope=PER_SITE
        case 3: ppa_scope=PORTFOLIO, green_target_scope=PORTFOLIO

    With PER_SITE PPA scope, `per_site_ppa_profiles` must provide one
    physical and one virtual series per site; their hourly sums must equal
    the portfolio profiles in :class:`ContractTerms`.
    """

    ppa_scope: Scope
    green_target_scope: Scope
    per_site_ppa_profiles: Mapping[str, PpaSplit] | None = None

    def case_number(self) -> int | None:
        """1, 2 or 3 for the standard setups, None for other combinations."""
        table = {
            (Scope.PER_SITE, Scope.PER_SITE): 1,
            (Scope.PORTFOLIO, Scope.PER_SITE): 2,
            (Scope.PORTFOLIO, Scope.PORTFOLIO): 3,
        }
        return table.get((self.ppa_scope, self.green_target_scope))


CASE_SCOPES: dict[int, tuple[Scope, Scope]] = {
    1: (Scope.PER_SITE, Scope.PER_SITE),
    2: (Scope.PORTFOLIO, Scope.PER_SITE),
    3: (Scope.PORTFOLIO, Scope.PORTFOLIO),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """A complete, self-contained problem instance."""

    grid: TimeGrid
    sites: tuple[SiteSpec, ...]
    contracts: ContractTerms
    prices: MarketPrices
    policy: PolicyConfig
    case: CaseConfig

    def __post_init__(self) -> None:
        object.__setattr__(self, "sites", tuple(self.sites))

    @property
    def step_count(self) -> int:
        return self.grid.step_count

    @property
    def step_hours(self) -> float:
        return self.grid.step_hours

    def site(self, site_id: str) -> SiteSpec:
        for s in self.sites:
            if s.site_id == site_id:
                return s
        raise KeyError(site_id)


@dataclass(frozen=True)
class Violation:
    """One broken invariant: a dotted path into the scenario plus a reason."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def dsp_demand(site: SiteSpec) -> float:
    """Hourly hydrogen draw (kg/h) of the site's downstream process.

    The inflexible share of electrolyzer capacity runs flat out to feed the
    downstream process, so the draw is efficiency * capacity * (1 - flex),
    identical in every hour.
    """
    el = site.electrolyzer
    return el.efficiency * el.capacity_mw * (1.0 - el.flexibility_rate)


# Tolerance for the per-site PPA split having to reproduce the portfolio
# profile hour by hour (relative to max(1, profile value)).
SPLIT_TOL = 1e-6


def validate_scenario(cfg: ScenarioConfig) -> list[Violation]:
    """Check every scenario invariant; an empty list means the instance is valid.

    Violations are data, not exceptions, and come back in a deterministic
    order (grid, sites in declared order, contracts, prices, policy, case).
    """
    v: list[Violation] = []
    add = v.append

    t_count = cfg.grid.step_count
    if not isinstance(t_count, int) or t_count < 1:
        add(Violation("grid.step_count", f"must be a positive integer, got {t_count!r}"))
    if not (_finite(cfg.grid.step_hours) and cfg.grid.step_hours > 0):
        add(Violation("grid.step_hours", f"must be > 0, got {cfg.grid.step_hours!r}"))

    if len(cfg.sites) == 0:
        add(Violation("sites", "at least one site is required"))
    seen_ids: set[str] = set()
    for i, site in enumerate(cfg.sites):
        p = f"sites[{i}]"
        if not site.site_id:
            add(Violation(f"{p}.site_id", "must be a non-empty identifier"))
        elif site.site_id in seen_ids:
            add(Violation(f"{p}.site_id", f"duplicate site_id {site.site_id!r}"))
        seen_ids.add(site.site_id)

        el = site.electrolyzer
        if not (_finite(el.efficiency) and el.efficiency > 0):
            add(Violation(f"{p}.electrolyzer.efficiency", f"must be > 0 kg/MWh, got {el.efficiency!r}"))
        if not (_finite(el.capacity_mw) and el.capacity_mw >= 0):
            add(Violation(f"{p}.electrolyzer.capacity_mw", f"must be >= 0, got {el.capacity_mw!r}"))
        if not (_finite(el.flexibility_rate) and 0.0 <= el.flexibility_rate <= 1.0):
            add(Violation(f"{p}.electrolyzer.flexibility_rate", f"must lie in [0, 1], got {el.flexibility_rate!r}"))

        rn = site.renewables
        if not (_finite(rn.wind_capacity_mw) and rn.wind_capacity_mw >= 0):
            add(Violation(f"{p}.renewables.wind_capacity_mw", f"must be >= 0, got {rn.wind_capacity_mw!r}"))
        if not (_finite(rn.pv_capacity_mw) and rn.pv_capacity_mw >= 0):
            add(Violation(f"{p}.renewables.pv_capacity_mw", f"must be >= 0, got {rn.pv_capacity_mw!r}"))

        st = site.storage
        if not (_finite(st.charge_efficiency) and 0.0 < st.charge_efficiency <= 1.0):
            add(Violation(f"{p}.storage.charge_efficiency", f"must lie in (0, 1], got {st.charge_efficiency!r}"))
        if not (_finite(st.discharge_efficiency) and 0.0 < st.discharge_efficiency <= 1.0):
            add(Violation(f"{p}.storage.discharge_efficiency", f"must lie in (0, 1], got {st.discharge_efficiency!r}"))
        if not (_finite(st.max_charge_mw) and st.max_charge_mw >= 0):
            add(Violation(f"{p}.storage.max_charge_mw", f"must be >= 0, got {st.max_charge_mw!r}"))
        if not (_finite(st.max_discharge_mw) and st.max_discharge_mw >= 0):
            add(Violation(f"{p}.storage.max_discharge_mw", f"must be >= 0, got {st.max_discharge_mw!r}"))
        if not (_finite(st.energy_min_mwh) and _finite(st.energy_max_mwh)
                and 0.0 <= st.energy_min_mwh <= st.energy_max_mwh):
            add(Violation(f"{p}.storage.energy_min_mwh",
                          f"need 0 <= energy_min_mwh <= energy_max_mwh, got "
                          f"[{st.energy_min_mwh!r}, {st.energy_max_mwh!r}]"))
        else:
            # Day starts and ends at half the rated capacity; that level must
            # be reachable inside the energy band.
            boundary = 0.5 * st.energy_max_mwh
            if not (st.energy_min_mwh <= boundary <= st.energy_max_mwh):
                add(Violation(f"{p}.storage.energy_min_mwh",
                              f"boundary level {boundary} MWh (50% of max) outside "
                              f"[{st.energy_min_mwh}, {st.energy_max_mwh}]"))

        if not (_finite(site.grid_limit_mw) and site.grid_limit_mw > 0):
            add(Violation(f"{p}.grid_limit_mw", f"must be > 0 and finite, got {site.grid_limit_mw!r}"))

    ct = cfg.contracts
    _check_series(v, "contracts.physical_ppa_profile", ct.physical_ppa_profile, t_count, lo=0.0)
    _check_series(v, "contracts.virtual_ppa_profile", ct.virtual_ppa_profile, t_count, lo=0.0)
    for name, val in (("physical_ppa_price", ct.physical_ppa_price),
                      ("virtual_ppa_strike", ct.virtual_ppa_strike),
                      ("grid_access_tariff", ct.grid_access_tariff)):
        if not _finite(val):
            add(Violation(f"contracts.{name}", f"must be finite, got {val!r}"))
    if not (_finite(ct.loss_rate) and 0.0 <= ct.loss_rate < 1.0):
        add(Violation("contracts.loss_rate", f"must lie in [0, 1), got {ct.loss_rate!r}"))

    pr = cfg.prices
    _check_series(v, "prices.dam_buy", pr.dam_buy, t_count)
    _check_series(v, "prices.dam_sell", pr.dam_sell, t_count)
    for name, val in (("bundled_h2", pr.bundled_h2), ("unbundled_h2", pr.unbundled_h2),
                      ("go_sell", pr.go_sell), ("go_buy", pr.go_buy)):
        if not _finite(val):
            add(Violation(f"prices.{name}", f"must be finite, got {val!r}"))

    po = cfg.policy
    if not (_finite(po.green_share) and 0.0 <= po.green_share <= 1.0):
        add(Violation("policy.green_share", f"must lie in [0, 1], got {po.green_share!r}"))
    if not (_finite(po.go_conversion) and po.go_conversion > 0):
        add(Violation("policy.go_conversion", f"must be > 0, got {po.go_conversion!r}"))
    if not (_finite(po.go_buy_cap) and po.go_buy_cap >= 0):
        add(Violation("policy.go_buy_cap", f"must be >= 0, got {po.go_buy_cap!r}"))
    if not (_finite(po.go_sell_cap) and po.go_sell_cap >= 0):
        add(Violation("policy.go_sell_cap", f"must be >= 0, got {po.go_sell_cap!r}"))
    _check_series(v, "policy.wind_cf", po.wind_cf, t_count, lo=0.0, hi=1.0)
    _check_series(v, "policy.pv_cf", po.pv_cf, t_count, lo=0.0, hi=1.0)

    _validate_case(v, cfg)
    return v


def _validate_case(v: list[Violation], cfg: ScenarioConfig) -> None:
    case = cfg.case
    if case.ppa_scope is not Scope.PER_SITE:
        return
    split = case.per_site_ppa_profiles
    if split is None:
        v.append(Violation("case.per_site_ppa_profiles",
                           "required when ppa_scope is per_site"))
        return
    site_ids = [s.site_id for s in cfg.sites]
    missing = [sid for sid in site_ids if sid not in split]
    for sid in missing:
        v.append(Violation(f"case.per_site_ppa_profiles[{sid}]", "missing split for site"))
    extra = [sid for sid in split if sid not in site_ids]
    for sid in sorted(extra):
        v.append(Violation(f"case.per_site_ppa_profiles[{sid}]", "split for unknown site"))

    t_count = cfg.grid.step_count
    complete = not missing
    for sid in site_ids:
        if sid not in split:
            continue
        pair = split[sid]
        _check_series(v, f"case.per_site_ppa_profiles[{sid}].physical", pair.physical, t_count, lo=0.0)
        _check_series(v, f"case.per_site_ppa_profiles[{sid}].virtual", pair.virtual, t_count, lo=0.0)
        if len(pair.physical) != t_count or len(pair.virtual) != t_count:
            complete = False

    if not complete:
        return
    for label, portfolio, pick in (
        ("physical", cfg.contracts.physical_ppa_profile, lambda p: p.physical),
        ("virtual", cfg.contracts.virtual_ppa_profile, lambda p: p.virtual),
    ):
        for t in range(t_count):
            total = sum(pick(split[sid])[t] for sid in site_ids)
            target = portfolio[t]
            if abs(total - target) > SPLIT_TOL * max(1.0, abs(target)):
                v.append(Violation(
                    f"case.per_site_ppa_profiles.{label}",
                    f"hour {t}: site profiles sum to {total:g}, portfolio profile is {target:g}"))


def _check_series(v: list[Violation], path: str, series: Series, t_count: int,
                  lo: float | None = None, hi: float | None = None) -> None:
    if len(series) != t_count:
        v.append(Violation(path, f"length {len(series)} != step_count {t_count}"))
        return
    for t, x in enumerate(series):
        if not _finite(x):
            v.append(Violation(path, f"hour {t}: value {x!r} is not finite"))
            return
        if lo is not None and x < lo:
            v.append(Violation(path, f"hour {t}: value {x:g} below {lo:g}"))
            return
        if hi is not None and x > hi:
            v.append(Violation(path, f"hour {t}: value {x:g} above {hi:g}"))
            return


def _finite(x: object) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)
