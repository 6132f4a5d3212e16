"""Shared fixtures: hand-sized instances whose optima are derivable on paper."""
from __future__ import annotations

import pytest

from h2portfolio.domain import (
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


def make_unit_scenario(*, wind_capacity: float = 4.0, go_buy_cap: float = 100.0,
                       go_sell_cap: float = 100.0, green_share: float = 0.8,
                       physical_ppa: float = 3.0, virtual_ppa: float = 2.0) -> ScenarioConfig:
    """One site, one hour, storage rates zero.

    With the default arguments the optimum is derivable by hand (see
    test_model.py::test_single_hour_closed_form): run the electrolyzer at
    capacity, buy the missing 5 MW, bundle all non-DSP hydrogen, buy the 3
    missing certificates; profit 277 EUR.
    """
    site = SiteSpec(
        site_id="s1",
        electrolyzer=ElectrolyzerSpec(efficiency=20.0, capacity_mw=10.0, flexibility_rate=0.5),
        renewables=RenewableSpec(wind_capacity_mw=wind_capacity, pv_capacity_mw=0.0),
        storage=StorageSpec(charge_efficiency=0.9, discharge_efficiency=0.9,
                            max_charge_mw=0.0, max_discharge_mw=0.0,
                            energy_min_mwh=0.0, energy_max_mwh=4.0),
        grid_limit_mw=20.0,
    )
    return ScenarioConfig(
        grid=TimeGrid(1, 1.0),
        sites=(site,),
        contracts=ContractTerms(
            physical_ppa_price=40.0,
            virtual_ppa_strike=60.0,
            grid_access_tariff=5.0,
            loss_rate=0.1,
            physical_ppa_profile=(physical_ppa,),
            virtual_ppa_profile=(virtual_ppa,),
        ),
        prices=MarketPrices(
            dam_buy=(50.0,),
            dam_sell=(45.0,),
            bundled_h2=7.0,
            unbundled_h2=3.0,
            go_sell=1.0,
            go_buy=2.0,
        ),
        policy=PolicyConfig(
            green_share=green_share,
            go_conversion=1.0,
            go_buy_cap=go_buy_cap,
            go_sell_cap=go_sell_cap,
            wind_cf=(0.5,),
            pv_cf=(0.0,),
        ),
        case=CaseConfig(Scope.PORTFOLIO, Scope.PORTFOLIO),
    )


# Objective of make_unit_scenario() derived by hand:
#   electrolyzer at 10 MW (DSP floor 5 MW), local 2 MW, PPA 3 MW, buy 5 MW
#   bundled 100 kg * 7 = 700; certificates short by 3 units * 2 = 6
#   power 5 MWh * 50 = 250; PPA 3 MWh * (1.1*40 + 5) = 147
#   CfD (60 - 50) * 2 MWh = 20
#   profit = 700 - 6 - 250 - 147 - 20 = 277
UNIT_SCENARIO_OPTIMUM = 277.0


def make_infeasible_scenario() -> ScenarioConfig:
    """Forced hydrogen demand with no certificate supply at a 100% green floor."""
    return make_unit_scenario(wind_capacity=0.0, go_buy_cap=0.0, go_sell_cap=0.0,
                              green_share=1.0, physical_ppa=0.0, virtual_ppa=0.0)


def unit_feasible_assignment() -> dict[str, float]:
    """A hand-checked interior feasible point of make_unit_scenario().

    Electrolyzer at 7 MW (window is [5, 10]), 2 MW bought, 40 kg bundled;
    certificate book balances from issuance alone.
    """
    a = {
        "p_EL[s1][0]": 7.0, "p_Local[s1][0]": 2.0, "p_PPPA[s1][0]": 3.0,
        "p_VPPA[s1][0]": 2.0, "p_DAM_Buy[s1][0]": 2.0, "p_DAM_Sell[s1][0]": 0.0,
        "p_EES[s1][0]": 0.0, "p_Ch[s1][0]": 0.0, "p_Dis[s1][0]": 0.0,
        "h_EL[s1][0]": 140.0, "h_BD[s1][0]": 40.0, "h_UBD[s1][0]": 0.0,
        "h_DSP[s1][0]": 100.0,
        "n_GO_VPPA[s1][0]": 2.0, "n_GO_PPPA[s1][0]": 3.0, "n_GO_Local[s1][0]": 2.0,
        "n_GO_Buy[s1][0]": 0.0, "n_GO_Sell[s1][0]": 0.0,
        "n_GO_BD[s1][0]": 2.0, "n_GO_DSP[s1][0]": 5.0,
        "e_EES[s1][0]": 2.0, "e_EES[s1][1]": 2.0,
        "i_DAM_Buy[s1][0]": 1.0, "i_DAM_Sell[s1][0]": 0.0,
        "i_EES_Ch[s1][0]": 0.0, "i_EES_Dis[s1][0]": 0.0,
        "i_GO_Sell[s1][0]": 0.0, "i_GO_Buy[s1][0]": 0.0,
        "P_PPPA_pf[PORTFOLIO][0]": 3.0, "P_VPPA_pf[PORTFOLIO][0]": 2.0,
        "p_DAM_Buy_pf[PORTFOLIO][0]": 2.0, "p_DAM_Sell_pf[PORTFOLIO][0]": 0.0,
        "h_BD_pf[PORTFOLIO][0]": 40.0, "h_UBD_pf[PORTFOLIO][0]": 0.0,
        "n_GO_Sell_pf[PORTFOLIO][0]": 0.0, "n_GO_Buy_pf[PORTFOLIO][0]": 0.0,
        "c_CfD[PORTFOLIO][0]": 20.0,
    }
    return a


@pytest.fixture
def unit_scenario() -> ScenarioConfig:
    return make_unit_scenario()


@pytest.fixture
def infeasible_scenario() -> ScenarioConfig:
    return make_infeasible_scenario()
