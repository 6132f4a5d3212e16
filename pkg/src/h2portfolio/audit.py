"""Independent feasibility audit of a solved schedule.

Every constraint family is recomputed here directly from the scenario and
the variable assignment, with its own arithmetic: nothing is read from the
model builder's constraint matrix, so a systematic builder error (sign,
scaling, missing term) shows up as audit residuals.

Residual convention: equalities report (lhs - rhs) / max(1, |rhs|) signed;
inequality rows report the positive excess over the bound, scaled the same
way so tolerances stay unitless across EUR, MW, kg, and certificate rows.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping

from .domain import ScenarioConfig, Scope, dsp_demand
from .model import (
    BINARY_KINDS,
    PORTFOLIO,
    PORTFOLIO_KINDS,
    SITE_HOUR_KINDS,
    var_name,
)

DAY = "DAY"


@dataclass(frozen=True)
class AuditEntry:
    tag: str
    scope: str
    hour: int | str
    residual: float
    tolerance: float
    passed: bool

    @property
    def family(self) -> str:
        return self.tag.split("[", 1)[0]


@dataclass
class AuditReport:
    entries: list[AuditEntry]
    green_share: float | None
    worst_residual: float

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[AuditEntry]:
        return [e for e in self.entries if not e.passed]

    def failing_families(self) -> set[str]:
        return {e.family for e in self.failures()}

    def verdict_line(self) -> str:
        """One machine-readable line for CI logs."""
        if self.ok:
            return f"AUDIT PASS entries={len(self.entries)} worst={self.worst_residual:.3e}"
        failed = self.failures()
        first = failed[0].tag if failed else "n/a"
        return (f"AUDIT FAIL failed={len(failed)}/{len(self.entries)} "
                f"worst={self.worst_residual:.3e} first={first}")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tag", "scope", "hour", "residual", "tolerance", "passed"])
            for e in self.entries:
                writer.writerow([e.tag, e.scope, e.hour, f"{e.residual:.12e}",
                                 f"{e.tolerance:.1e}", e.passed])


def green_share_from_assignment(cfg: ScenarioConfig, a: Mapping[str, float]) -> float | None:
    """Certified share of daily hydrogen production, None when nothing is produced.

    Numerator: certificates acquired minus sold, in MWh-equivalent.
    Denominator: hydrogen output (all channels) converted to MWh through
    each site's electrolyzer efficiency.
    """
    T = cfg.grid.step_count
    gamma = cfg.policy.go_conversion
    num = 0.0
    den = 0.0
    for site in cfg.sites:
        sid = site.site_id
        for t in range(T):
            num += (a[var_name("n_GO_VPPA", sid, t)] + a[var_name("n_GO_PPPA", sid, t)]
                    + a[var_name("n_GO_Local", sid, t)] + a[var_name("n_GO_Buy", sid, t)]
                    - a[var_name("n_GO_Sell", sid, t)]) / gamma
            den += (a[var_name("h_BD", sid, t)] + a[var_name("h_UBD", sid, t)]
                    + a[var_name("h_DSP", sid, t)]) / site.electrolyzer.efficiency
    if den <= 1e-12:
        return None
    return num / den


def green_share(cfg: ScenarioConfig, sol) -> float | None:
    return green_share_from_assignment(cfg, sol.assignment)


def audit(cfg: ScenarioConfig, sol, tol: float = 1e-6) -> AuditReport:
    """Recompute every constraint family at the given solution.

    Produces one entry per constraint instance, tagged exactly like the
    model builder's rows; a variable missing from the assignment yields an
    error entry naming it and fails the report.
    """
    raw = sol.assignment if hasattr(sol, "assignment") else sol
    entries: list[AuditEntry] = []

    missing = [name for name in _expected_names(cfg) if name not in raw]
    for name in missing:
        entries.append(AuditEntry("error[missing_variable]", name, DAY,
                                  math.inf, tol, False))
    a = {name: raw.get(name, math.nan) for name in _expected_names(cfg)}

    T = cfg.grid.step_count
    dt = cfg.grid.step_hours
    gamma = cfg.policy.go_conversion
    ct, pr, po = cfg.contracts, cfg.prices, cfg.policy

    def v(kind: str, scope: str, hour: int) -> float:
        return a[var_name(kind, scope, hour)]

    def emit(tag: str, scope: str, hour, lhs: float, relation: str, rhs: float) -> None:
        scale = max(1.0, abs(rhs))
        if relation == "=":
            residual = (lhs - rhs) / scale
            ok = abs(residual) <= tol
        elif relation == "<=":
            residual = max(0.0, lhs - rhs) / scale
            ok = residual <= tol
        else:  # ">="
            residual = max(0.0, rhs - lhs) / scale
            ok = residual <= tol
        if math.isnan(residual):
            ok = False
        entries.append(AuditEntry(tag, scope, hour, residual, tol, ok))

    # Hourly CfD settlement.
    for t in range(T):
        emit(f"eq2[t={t}]", PORTFOLIO, t, v("c_CfD", PORTFOLIO, t), "=",
             (ct.virtual_ppa_strike - pr.dam_buy[t]) * dt * v("P_VPPA_pf", PORTFOLIO, t))

    # Site physics.
    for site in cfg.sites:
        sid = site.site_id
        el = site.electrolyzer
        dsp_kg = dsp_demand(site) * dt
        for t in range(T):
            emit(f"eq3[{sid}][t={t}]", sid, t, v("h_EL", sid, t), "=",
                 el.efficiency * dt * v("p_EL", sid, t))
            emit(f"eq4[{sid}][t={t}]", sid, t,
                 v("p_Local", sid, t) + v("p_PPPA", sid, t)
                 + v("p_DAM_Buy", sid, t) - v("p_DAM_Sell", sid, t), "=",
                 v("p_EES", sid, t) + v("p_EL", sid, t))
            emit(f"eq5[{sid}][t={t}]", sid, t, v("p_Local", sid, t), "=",
                 po.wind_cf[t] * site.renewables.wind_capacity_mw
                 + po.pv_cf[t] * site.renewables.pv_capacity_mw)
            emit(f"eq6_lb[{sid}][t={t}]", sid, t, v("p_EL", sid, t), ">=",
                 el.capacity_mw * (1.0 - el.flexibility_rate))
            emit(f"eq6_ub[{sid}][t={t}]", sid, t, v("p_EL", sid, t), "<=", el.capacity_mw)
            emit(f"eq7[{sid}][t={t}]", sid, t, v("h_DSP", sid, t), "=", dsp_kg)

    # PPA pinning, always at portfolio level, plus the per-site split if scoped.
    for t in range(T):
        emit(f"eq8[t={t}]", PORTFOLIO, t,
             sum(v("p_PPPA", s.site_id, t) for s in cfg.sites), "=",
             v("P_PPPA_pf", PORTFOLIO, t))
        emit(f"eq9[t={t}]", PORTFOLIO, t,
             sum(v("p_VPPA", s.site_id, t) for s in cfg.sites), "=",
             v("P_VPPA_pf", PORTFOLIO, t))
        emit(f"eq8_profile[t={t}]", PORTFOLIO, t, v("P_PPPA_pf", PORTFOLIO, t), "=",
             ct.physical_ppa_profile[t])
        emit(f"eq9_profile[t={t}]", PORTFOLIO, t, v("P_VPPA_pf", PORTFOLIO, t), "=",
             ct.virtual_ppa_profile[t])
    if cfg.case.ppa_scope is Scope.PER_SITE and cfg.case.per_site_ppa_profiles:
        for site in cfg.sites:
            sid = site.site_id
            pair = cfg.case.per_site_ppa_profiles[sid]
            for t in range(T):
                emit(f"eq8_site[{sid}][t={t}]", sid, t, v("p_PPPA", sid, t), "=",
                     pair.physical[t])
                emit(f"eq9_site[{sid}][t={t}]", sid, t, v("p_VPPA", sid, t), "=",
                     pair.virtual[t])

    # Market aggregation and buy/sell switching.
    for t in range(T):
        emit(f"eq10[t={t}]", PORTFOLIO, t, v("p_DAM_Buy_pf", PORTFOLIO, t), "=",
             sum(v("p_DAM_Buy", s.site_id, t) for s in cfg.sites))
        emit(f"eq11[t={t}]", PORTFOLIO, t, v("p_DAM_Sell_pf", PORTFOLIO, t), "=",
             sum(v("p_DAM_Sell", s.site_id, t) for s in cfg.sites))
    for site in cfg.sites:
        sid = site.site_id
        for t in range(T):
            emit(f"eq12[{sid}][t={t}]", sid, t,
                 v("p_DAM_Buy", sid, t) - site.grid_limit_mw * v("i_DAM_Buy", sid, t),
                 "<=", 0.0)
            emit(f"eq13[{sid}][t={t}]", sid, t,
                 v("p_DAM_Sell", sid, t) - site.grid_limit_mw * v("i_DAM_Sell", sid, t),
                 "<=", 0.0)
            emit(f"eq14[{sid}][t={t}]", sid, t,
                 v("i_DAM_Buy", sid, t) + v("i_DAM_Sell", sid, t), "<=", 1.0)

    # Storage.
    for site in cfg.sites:
        sid = site.site_id
        st = site.storage
        half = 0.5 * st.energy_max_mwh
        emit(f"boundary_soc_init[{sid}]", sid, 0, v("e_EES", sid, 0), "=", half)
        emit(f"boundary_soc_final[{sid}]", sid, T, v("e_EES", sid, T), "=", half)
        for t in range(T):
            emit(f"eq15[{sid}][t={t}]", sid, t, v("e_EES", sid, t + 1), "=",
                 v("e_EES", sid, t)
                 + st.charge_efficiency * dt * v("p_Ch", sid, t)
                 - dt / st.discharge_efficiency * v("p_Dis", sid, t))
            emit(f"eq16[{sid}][t={t}]", sid, t,
                 v("p_Ch", sid, t) - st.max_charge_mw * v("i_EES_Ch", sid, t), "<=", 0.0)
            emit(f"eq17[{sid}][t={t}]", sid, t,
                 v("p_Dis", sid, t) - st.max_discharge_mw * v("i_EES_Dis", sid, t), "<=", 0.0)
            emit(f"eq18[{sid}][t={t}]", sid, t,
                 v("i_EES_Ch", sid, t) + v("i_EES_Dis", sid, t), "<=", 1.0)
            emit(f"eq19[{sid}][t={t}]", sid, t, v("p_EES", sid, t), "=",
                 v("p_Ch", sid, t) - v("p_Dis", sid, t))
        for t in range(T + 1):
            emit(f"eq20_lb[{sid}][t={t}]", sid, t, v("e_EES", sid, t), ">=", st.energy_min_mwh)
            emit(f"eq20_ub[{sid}][t={t}]", sid, t, v("e_EES", sid, t), "<=", st.energy_max_mwh)

    # Hydrogen balance and aggregation.
    for site in cfg.sites:
        sid = site.site_id
        for t in range(T):
            emit(f"eq21[{sid}][t={t}]", sid, t, v("h_EL", sid, t), "=",
                 v("h_BD", sid, t) + v("h_UBD", sid, t) + v("h_DSP", sid, t))
    for t in range(T):
        emit(f"eq22[t={t}]", PORTFOLIO, t, v("h_BD_pf", PORTFOLIO, t), "=",
             sum(v("h_BD", s.site_id, t) for s in cfg.sites))
        emit(f"eq23[t={t}]", PORTFOLIO, t, v("h_UBD_pf", PORTFOLIO, t), "=",
             sum(v("h_UBD", s.site_id, t) for s in cfg.sites))

    # Certificates: conservation, issuance, retirement, trading.
    for site in cfg.sites:
        sid = site.site_id
        eff = site.electrolyzer.efficiency
        acquired = sum(v("n_GO_VPPA", sid, t) + v("n_GO_PPPA", sid, t)
                       + v("n_GO_Local", sid, t) + v("n_GO_Buy", sid, t)
                       for t in range(T))
        used = sum(v("n_GO_Sell", sid, t) + v("n_GO_BD", sid, t) + v("n_GO_DSP", sid, t)
                   for t in range(T))
        emit(f"eq24[{sid}]", sid, DAY, acquired, "=", used)
        for t in range(T):
            emit(f"eq25[{sid}][t={t}]", sid, t, v("n_GO_VPPA", sid, t), "=",
                 gamma * dt * v("p_VPPA", sid, t))
            emit(f"eq26[{sid}][t={t}]", sid, t, v("n_GO_PPPA", sid, t), "=",
                 gamma * dt * v("p_PPPA", sid, t))
            emit(f"eq27[{sid}][t={t}]", sid, t, v("n_GO_Local", sid, t), "=",
                 gamma * dt * v("p_Local", sid, t))
            emit(f"eq28[{sid}][t={t}]", sid, t, v("n_GO_BD", sid, t), "=",
                 gamma / eff * v("h_BD", sid, t))
            emit(f"eq29[{sid}][t={t}]", sid, t, v("n_GO_DSP", sid, t), "=",
                 gamma / eff * v("h_DSP", sid, t))
            emit(f"eq31[{sid}][t={t}]", sid, t,
                 v("n_GO_Sell", sid, t) - po.go_sell_cap * v("i_GO_Sell", sid, t), "<=", 0.0)
            emit(f"eq32[{sid}][t={t}]", sid, t,
                 v("n_GO_Buy", sid, t) - po.go_buy_cap * v("i_GO_Buy", sid, t), "<=", 0.0)
            emit(f"eq33[{sid}][t={t}]", sid, t,
                 v("i_GO_Sell", sid, t) + v("i_GO_Buy", sid, t), "<=", 1.0)
    for t in range(T):
        emit(f"eq34[t={t}]", PORTFOLIO, t, v("n_GO_Sell_pf", PORTFOLIO, t), "=",
             sum(v("n_GO_Sell", s.site_id, t) for s in cfg.sites))
        emit(f"eq35[t={t}]", PORTFOLIO, t, v("n_GO_Buy_pf", PORTFOLIO, t), "=",
             sum(v("n_GO_Buy", s.site_id, t) for s in cfg.sites))
    emit("eq36", PORTFOLIO, DAY,
         sum(v("n_GO_Buy", s.site_id, t) for s in cfg.sites for t in range(T)),
         "<=", po.go_buy_cap)
    emit("eq37", PORTFOLIO, DAY,
         sum(v("n_GO_Sell", s.site_id, t) for s in cfg.sites for t in range(T)),
         "<=", po.go_sell_cap)

    # Green floor at the scope the case dictates.
    def green_lhs_rhs(sites):
        lhs = 0.0
        rhs = 0.0
        for site in sites:
            sid = site.site_id
            for t in range(T):
                lhs += (v("n_GO_VPPA", sid, t) + v("n_GO_PPPA", sid, t)
                        + v("n_GO_Local", sid, t) + v("n_GO_Buy", sid, t)
                        - v("n_GO_Sell", sid, t)) / gamma
                rhs += (v("h_BD", sid, t) + v("h_UBD", sid, t)
                        + v("h_DSP", sid, t)) / site.electrolyzer.efficiency
        return lhs, po.green_share * rhs

    if cfg.case.green_target_scope is Scope.PER_SITE:
        for site in cfg.sites:
            lhs, rhs = green_lhs_rhs([site])
            emit(f"eq30[{site.site_id}]", site.site_id, DAY, lhs, ">=", rhs)
    else:
        lhs, rhs = green_lhs_rhs(cfg.sites)
        emit(f"eq30[{PORTFOLIO}]", PORTFOLIO, DAY, lhs, ">=", rhs)

    finite = [abs(e.residual) for e in entries if math.isfinite(e.residual)]
    worst = max(finite) if finite else math.inf
    share = None
    if not missing:
        share = green_share_from_assignment(cfg, a)
    return AuditReport(entries=entries, green_share=share, worst_residual=worst)


def _expected_names(cfg: ScenarioConfig) -> list[str]:
    T = cfg.grid.step_count
    names: list[str] = []
    for site in cfg.sites:
        sid = site.site_id
        for kind in SITE_HOUR_KINDS:
            names += [var_name(kind, sid, t) for t in range(T)]
        names += [var_name("e_EES", sid, t) for t in range(T + 1)]
        for kind in BINARY_KINDS:
            names += [var_name(kind, sid, t) for t in range(T)]
    for kind in PORTFOLIO_KINDS:
        names += [var_name(kind, PORTFOLIO, t) for t in range(T)]
    return names
