"""Bundled synthetic scenarios.

The generators below produce feasible-by-construction instances used by the
test-suite, the demo scenario shipped in ``fixtures/``, and anyone wanting a
quick CLI run without real data.  Feasibility rests on three sizing rules:

  * grid_limit_mw = 2 * (electrolyzer capacity + charge rate), while local
    renewables plus the site's PPA share stay below it, so any must-take
    surplus can always be sold and any electrolyzer load can be bought;
  * the certificate purchase cap covers the retirement the downstream
    hydrogen demand forces even when sites have no issuance of their own;
  * the certificate sale cap covers the largest surplus the must-take
    issuance can create.

Sell prices sit strictly below buy prices (power and certificates alike),
which kills simultaneous buy/sell degeneracy and keeps solves quick.
"""
from __future__ import annotations

import numpy as np

from .domain import (
    CaseConfig,
    ContractTerms,
    ElectrolyzerSpec,
    MarketPrices,
    PolicyConfig,
    RenewableSpec,
    ScenarioConfig,
    Scope,
    SiteSpec,
    StorageSpec,
    TimeGrid,
)


def random_scenario(seed: int, n_sites: int | None = None, n_hours: int = 24) -> ScenarioConfig:
    """A randomized, always-feasible portfolio scenario."""
    rng = np.random.default_rng(seed)
    E = int(n_sites if n_sites is not None else rng.integers(2, 6))
    T = int(n_hours)
    dt = 1.0

    sites = []
    caps = []
    for i in range(E):
        cap = float(rng.uniform(5.0, 20.0))
        caps.append(cap)
        flex = 0.0 if rng.random() < 0.25 else float(rng.uniform(0.3, 1.0))
        rate = 0.0 if rng.random() < 0.3 else float(rng.uniform(0.1, 0.5) * cap)
        e_max = float(rate * rng.uniform(1.0, 4.0))
        e_min = float(e_max * rng.uniform(0.0, 0.4))
        sites.append(SiteSpec(
            site_id=f"site{i + 1}",
            electrolyzer=ElectrolyzerSpec(
                efficiency=float(rng.uniform(15.0, 25.0)),
                capacity_mw=cap,
                flexibility_rate=flex,
            ),
            renewables=RenewableSpec(
                wind_capacity_mw=float(rng.uniform(0.0, 0.5) * cap),
                pv_capacity_mw=float(rng.uniform(0.0, 0.4) * cap),
            ),
            storage=StorageSpec(
                charge_efficiency=float(rng.uniform(0.85, 0.98)),
                discharge_efficiency=float(rng.uniform(0.85, 0.98)),
                max_charge_mw=rate,
                max_discharge_mw=rate,
                energy_min_mwh=e_min,
                energy_max_mwh=e_max,
            ),
            grid_limit_mw=2.0 * (cap + rate),
        ))
    total_cap = sum(caps)

    wind_cf = _smooth_series(rng, T, lo=0.05, hi=0.95)
    pv_cf = _daylight_series(rng, T)
    ppa_shape = _smooth_series(rng, T, lo=0.3, hi=1.0)
    vppa_shape = _smooth_series(rng, T, lo=0.3, hi=1.0)
    ppa_scale = float(rng.uniform(0.05, 0.35) * total_cap)
    vppa_scale = float(rng.uniform(0.05, 0.35) * total_cap)
    physical_profile = tuple(ppa_scale * x for x in ppa_shape)
    virtual_profile = tuple(vppa_scale * x for x in vppa_shape)

    dam_buy = tuple(float(x) for x in
                    np.clip(rng.uniform(30.0, 90.0) + 25.0 * np.asarray(_smooth_series(rng, T)) - 12.5,
                            5.0, None))
    dam_sell = tuple(max(1.0, b - float(rng.uniform(2.0, 8.0))) for b in dam_buy)
    bundled = float(rng.uniform(4.0, 9.0))
    unbundled = bundled * float(rng.uniform(0.5, 0.95))
    go_buy_price = float(rng.uniform(1.0, 5.0))
    go_sell_price = go_buy_price * float(rng.uniform(0.2, 0.8))

    gamma = float(rng.uniform(0.5, 2.0))
    # The purchase cap must cover the retirement forced by the downstream
    # demand even for sites with zero issuance of their own; beyond that it
    # only grants a fraction of what bundling the flexible production would
    # need, so certificates stay scarce and the green floor can bind.
    forced_retirement = gamma * sum(
        (1.0 - s.electrolyzer.flexibility_rate) * s.electrolyzer.capacity_mw * T * dt
        for s in sites)
    flexible_retirement = gamma * sum(
        s.electrolyzer.flexibility_rate * s.electrolyzer.capacity_mw * T * dt
        for s in sites)
    max_issuance = gamma * (
        sum((s.renewables.wind_capacity_mw + s.renewables.pv_capacity_mw) * T * dt for s in sites)
        + sum(physical_profile) * dt + sum(virtual_profile) * dt)
    policy = PolicyConfig(
        green_share=float(rng.uniform(0.75, 0.95)),
        go_conversion=gamma,
        go_buy_cap=(forced_retirement * float(rng.uniform(1.02, 1.2))
                    + flexible_retirement * float(rng.uniform(0.0, 0.2)) + 1.0),
        go_sell_cap=max_issuance * float(rng.uniform(1.05, 1.5)) + 1.0,
        wind_cf=wind_cf,
        pv_cf=pv_cf,
    )

    contracts = ContractTerms(
        physical_ppa_price=float(rng.uniform(30.0, 60.0)),
        virtual_ppa_strike=float(rng.uniform(40.0, 70.0)),
        grid_access_tariff=float(rng.uniform(2.0, 10.0)),
        loss_rate=float(rng.uniform(0.0, 0.1)),
        physical_ppa_profile=physical_profile,
        virtual_ppa_profile=virtual_profile,
    )
    prices = MarketPrices(
        dam_buy=dam_buy,
        dam_sell=dam_sell,
        bundled_h2=bundled,
        unbundled_h2=unbundled,
        go_sell=go_sell_price,
        go_buy=go_buy_price,
    )
    return ScenarioConfig(
        grid=TimeGrid(T, dt),
        sites=tuple(sites),
        contracts=contracts,
        prices=prices,
        policy=policy,
        case=CaseConfig(Scope.PORTFOLIO, Scope.PORTFOLIO),
    )


def tiny_scenario(seed: int, n_sites: int = 1, n_hours: int = 1,
                  storage: bool = True, go_trading: bool = True) -> ScenarioConfig:
    """A small instance sized for the enumeration oracle.

    With both switches on, each site-hour carries 6 live binaries; turning a
    switch off zeroes the corresponding capability so its binaries become
    degenerate and the oracle prunes them.
    """
    rng = np.random.default_rng(seed)
    E, T = int(n_sites), int(n_hours)
    dt = 1.0

    sites = []
    for i in range(E):
        cap = float(rng.uniform(5.0, 10.0))
        # Without certificate trading every unit of issuance must be retired
        # on site, so keep the downstream demand at zero (fully flexible) and
        # issuance below electrolyzer throughput.
        flex = 1.0 if not go_trading else float(rng.uniform(0.2, 1.0))
        rate = float(rng.uniform(0.2, 0.5) * cap) if storage else 0.0
        e_max = rate * float(rng.uniform(1.5, 3.0))
        sites.append(SiteSpec(
            site_id=f"site{i + 1}",
            electrolyzer=ElectrolyzerSpec(float(rng.uniform(15.0, 25.0)), cap, flex),
            renewables=RenewableSpec(float(rng.uniform(0.0, 0.3) * cap),
                                     float(rng.uniform(0.0, 0.2) * cap)),
            storage=StorageSpec(0.9, 0.9, rate, rate, 0.0, e_max),
            grid_limit_mw=2.0 * (cap + rate),
        ))
    total_cap = sum(s.electrolyzer.capacity_mw for s in sites)

    physical_profile = tuple(float(rng.uniform(0.05, 0.3) * total_cap) for _ in range(T))
    virtual_profile = tuple(float(rng.uniform(0.05, 0.3) * total_cap) for _ in range(T))
    dam_buy = tuple(float(rng.uniform(30.0, 90.0)) for _ in range(T))
    dam_sell = tuple(max(1.0, b - float(rng.uniform(2.0, 10.0))) for b in dam_buy)
    bundled = float(rng.uniform(4.0, 9.0))
    gamma = 1.0

    if go_trading:
        buy_cap = gamma * sum((1.0 - s.electrolyzer.flexibility_rate)
                              * s.electrolyzer.capacity_mw * T * dt for s in sites) * 1.2 + 1.0
        sell_cap = gamma * (sum((s.renewables.wind_capacity_mw + s.renewables.pv_capacity_mw)
                                * T * dt for s in sites)
                            + (sum(physical_profile) + sum(virtual_profile)) * dt) * 1.2 + 1.0
    else:
        buy_cap = sell_cap = 0.0

    return ScenarioConfig(
        grid=TimeGrid(T, dt),
        sites=tuple(sites),
        contracts=ContractTerms(
            physical_ppa_price=float(rng.uniform(30.0, 60.0)),
            virtual_ppa_strike=float(rng.uniform(40.0, 70.0)),
            grid_access_tariff=float(rng.uniform(2.0, 8.0)),
            loss_rate=float(rng.uniform(0.0, 0.08)),
            physical_ppa_profile=physical_profile,
            virtual_ppa_profile=virtual_profile,
        ),
        prices=MarketPrices(
            dam_buy=dam_buy,
            dam_sell=dam_sell,
            bundled_h2=bundled,
            unbundled_h2=float(rng.uniform(1.0, 0.6 * bundled)),
            go_sell=float(rng.uniform(0.5, 2.0)),
            go_buy=float(rng.uniform(2.0, 5.0)),
        ),
        policy=PolicyConfig(
            green_share=float(rng.uniform(0.6, 0.95)),
            go_conversion=gamma,
            go_buy_cap=buy_cap,
            go_sell_cap=sell_cap,
            wind_cf=tuple(float(rng.uniform(0.0, 1.0)) for _ in range(T)),
            pv_cf=tuple(float(rng.uniform(0.0, 1.0)) for _ in range(T)),
        ),
        case=CaseConfig(Scope.PORTFOLIO, Scope.PORTFOLIO),
    )


def demo_scenario() -> ScenarioConfig:
    """The deterministic five-site scenario shipped as fixtures/demo_5site_24h.json."""
    return random_scenario(seed=20250301, n_sites=5, n_hours=24)


def _smooth_series(rng: np.random.Generator, n: int,
                   lo: float = 0.0, hi: float = 1.0) -> tuple[float, ...]:
    """Random walk smoothed with a short moving average, clipped to [lo, hi]."""
    steps = rng.normal(0.0, 0.25, size=n)
    walk = np.cumsum(steps) + rng.uniform(0.3, 0.7)
    kernel = np.ones(3) / 3.0
    padded = np.concatenate([walk[:1], walk, walk[-1:]])
    smooth = np.convolve(padded, kernel, mode="valid")
    span = smooth.max() - smooth.min()
    if span < 1e-9:
        return tuple(float(np.clip(smooth[0], lo, hi)) for _ in range(n))
    scaled = lo + (hi - lo) * (smooth - smooth.min()) / span
    return tuple(float(x) for x in scaled[:n])


def _daylight_series(rng: np.random.Generator, n: int) -> tuple[float, ...]:
    """A solar-like bell: zero at night, peaking mid-series."""
    hours = np.arange(n)
    mid = n / 2.0 + rng.uniform(-1.5, 1.5)
    width = max(2.0, n / 6.0)
    bell = np.exp(-0.5 * ((hours - mid) / width) ** 2)
    bell[bell < 0.05] = 0.0
    amplitude = rng.uniform(0.5, 1.0)
    return tuple(float(np.clip(amplitude * b, 0.0, 1.0)) for b in bell)
