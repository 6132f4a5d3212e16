"""MILP formulation of the day-ahead portfolio scheduling problem.

Builds a solver-agnostic problem container (variables, linear constraints,
objective) from a :class:`~h2portfolio.domain.ScenarioConfig`.  Every
constraint carries a tag naming its row family and instance, e.g.
``eq4[siteA][t=7]``; the full numbered formulation behind the family names
lives in ``docs/model_reference.md``, together with a closed-form census of
variable and constraint counts that the test-suite checks.

Row families in brief (E sites, T hours, dt = step_hours):

    eq2    CfD settlement definition, hourly
    eq3    hydrogen production  h_EL = eff * p_EL * dt
    eq4    site power balance   local + PPA + buy - sell = storage + electrolyzer
    eq5    must-take renewables p_Local = wind_cf*W + pv_cf*PV
    eq6    electrolyzer operating window (lb from the downstream demand, ub capacity)
    eq7    downstream hydrogen demand, fixed per hour
    eq8/9  physical/virtual PPA aggregation + take-as-produced pinning
           (eq8_profile / eq9_profile; eq8_site / eq9_site under per-site scope)
    eq10/11  market buy/sell portfolio aggregation
    eq12-14  buy/sell switching: gating by grid_limit_mw and mutual exclusivity
    eq15     storage state-of-charge recursion (+ boundary_soc_init/_final at 50%)
    eq16-18  charge/discharge rate gating and exclusivity
    eq19     net storage exchange  p_EES = p_Ch - p_Dis
    eq20     state-of-charge band [E_min, E_max]
    eq21-23  hydrogen balance and portfolio aggregation
    eq24     per-site daily certificate conservation
    eq25-29  certificate issuance (PPAs, local renewables) and retirement
             (bundled sales, downstream use)
    eq30     green-hydrogen floor, per site or portfolio-wide
    eq31-33  certificate buy/sell gating (daily caps as coupling bound) and exclusivity
    eq34/35  certificate trade portfolio aggregation
    eq36/37  daily certificate purchase/sale caps

Scoping (which eq8/eq9/eq30 rows exist) is applied by
:func:`scope_constraints`; :func:`build_model` composes the base model with
the scenario's own :class:`~h2portfolio.domain.CaseConfig`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .domain import CaseConfig, ScenarioConfig, Scope, Violation, dsp_demand, validate_scenario

INF = float("inf")


class Integrality(Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


# Per-site-per-hour decision variables, in canonical order.
SITE_HOUR_KINDS: tuple[str, ...] = (
    "p_EL", "p_Local", "p_PPPA", "p_VPPA", "p_DAM_Buy", "p_DAM_Sell",
    "p_EES", "p_Ch", "p_Dis",
    "h_EL", "h_BD", "h_UBD", "h_DSP",
    "n_GO_VPPA", "n_GO_PPPA", "n_GO_Local", "n_GO_Buy", "n_GO_Sell",
    "n_GO_BD", "n_GO_DSP",
)
BINARY_KINDS: tuple[str, ...] = (
    "i_DAM_Buy", "i_DAM_Sell", "i_EES_Ch", "i_EES_Dis", "i_GO_Sell", "i_GO_Buy",
)
# Portfolio-level hourly variables (PPA quantities, market aggregates, CfD).
PORTFOLIO_KINDS: tuple[str, ...] = (
    "P_PPPA_pf", "P_VPPA_pf", "p_DAM_Buy_pf", "p_DAM_Sell_pf",
    "h_BD_pf", "h_UBD_pf", "n_GO_Sell_pf", "n_GO_Buy_pf", "c_CfD",
)

PORTFOLIO = "PORTFOLIO"

# Variables unbounded below: net storage exchange and the CfD cash flow.
FREE_KINDS = frozenset({"p_EES", "c_CfD"})


def var_name(kind: str, scope: str, hour: int) -> str:
    return f"{kind}[{scope}][{hour}]"


@dataclass(frozen=True)
class VariableRef:
    """One decision variable: kind + scope (site id or PORTFOLIO) + hour."""

    kind: str
    scope: str
    hour: int
    lower: float
    upper: float
    integrality: Integrality

    @property
    def name(self) -> str:
        return var_name(self.kind, self.scope, self.hour)


@dataclass(frozen=True)
class Constraint:
    """A tagged linear row: sum(coeff * var) REL rhs."""

    tag: str
    terms: tuple[tuple[str, float], ...]
    relation: str  # "<=", "=" or ">="
    rhs: float

    @property
    def family(self) -> str:
        return self.tag.split("[", 1)[0]


@dataclass
class MilpProblem:
    """Solver-agnostic MILP container.

    Immutable once built (scoping returns a new instance); the private
    matrix cache set by the solver backend does not change the model.
    """

    scenario: ScenarioConfig
    variables: list[VariableRef]
    constraints: list[Constraint]
    objective: tuple[tuple[str, float], ...]  # maximized
    scoped: bool
    _var_index: dict[str, int] | None = field(default=None, repr=False, compare=False)
    _matrix_cache: object = field(default=None, repr=False, compare=False)

    @property
    def var_index(self) -> dict[str, int]:
        if self._var_index is None:
            self._var_index = {v.name: i for i, v in enumerate(self.variables)}
        return self._var_index

    def binaries(self) -> list[VariableRef]:
        return [v for v in self.variables if v.integrality is Integrality.BINARY]

    def tags(self) -> Iterator[str]:
        return (c.tag for c in self.constraints)

    def family_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.constraints:
            counts[c.family] = counts.get(c.family, 0) + 1
        return counts


class ScenarioError(ValueError):
    """Raised when a scenario fails validation at a point that needs a valid one."""

    def __init__(self, violations) -> None:
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"invalid scenario: {lines}{more}")


def build_model(cfg: ScenarioConfig) -> MilpProblem:
    """Build the complete MILP for `cfg`, scoped per its CaseConfig."""
    violations = validate_scenario(cfg)
    if violations:
        raise ScenarioError(violations)
    return scope_constraints(cfg.case, build_unscoped_model(cfg))


def build_unscoped_model(cfg: ScenarioConfig) -> MilpProblem:
    """Everything except the PPA pinning (eq8/eq9) and green floor (eq30) rows.

    The result is not meant to be solved directly: the portfolio PPA
    variables are dangling until :func:`scope_constraints` pins them.
    """
    if cfg.grid.step_count < 1:
        raise ScenarioError([Violation("grid.step_count", "horizon must contain at least one step")])

    T = cfg.grid.step_count
    dt = cfg.grid.step_hours
    hours = range(T)
    b = _Emitter(cfg)

    # --- variables -------------------------------------------------------
    for site in cfg.sites:
        sid = site.site_id
        for kind in SITE_HOUR_KINDS:
            lower = -INF if kind in FREE_KINDS else 0.0
            for t in hours:
                b.add_var(kind, sid, t, lower, INF, Integrality.CONTINUOUS)
        # T+1 state-of-charge points: index t is the level entering hour t,
        # index T the level after the last hour.
        for t in range(T + 1):
            b.add_var("e_EES", sid, t, 0.0, INF, Integrality.CONTINUOUS)
        for kind in BINARY_KINDS:
            for t in hours:
                b.add_var(kind, sid, t, 0.0, 1.0, Integrality.BINARY)
    for kind in PORTFOLIO_KINDS:
        lower = -INF if kind in FREE_KINDS else 0.0
        for t in hours:
            b.add_var(kind, PORTFOLIO, t, lower, INF, Integrality.CONTINUOUS)

    # --- objective (maximize daily profit) -------------------------------
    ct, pr = cfg.contracts, cfg.prices
    pppa_unit_cost = (1.0 + ct.loss_rate) * ct.physical_ppa_price + ct.grid_access_tariff
    obj: list[tuple[str, float]] = []
    for t in hours:
        obj.append((var_name("h_BD_pf", PORTFOLIO, t), pr.bundled_h2))
        obj.append((var_name("h_UBD_pf", PORTFOLIO, t), pr.unbundled_h2))
        obj.append((var_name("n_GO_Sell_pf", PORTFOLIO, t), pr.go_sell))
        obj.append((var_name("n_GO_Buy_pf", PORTFOLIO, t), -pr.go_buy))
        obj.append((var_name("p_DAM_Sell_pf", PORTFOLIO, t), pr.dam_sell[t] * dt))
        obj.append((var_name("p_DAM_Buy_pf", PORTFOLIO, t), -pr.dam_buy[t] * dt))
        obj.append((var_name("P_PPPA_pf", PORTFOLIO, t), -pppa_unit_cost * dt))
        obj.append((var_name("c_CfD", PORTFOLIO, t), -1.0))
    b.objective = tuple(obj)

    # --- CfD settlement ---------------------------------------------------
    # c_CfD[t] = (strike - dam_buy[t]) * P_VPPA_pf[t] * dt
    for t in hours:
        b.eq(f"eq2[t={t}]",
             [("c_CfD", PORTFOLIO, t, 1.0),
              ("P_VPPA_pf", PORTFOLIO, t, -(ct.virtual_ppa_strike - pr.dam_buy[t]) * dt)],
             0.0)

    # --- per-site hourly physics ------------------------------------------
    for site in cfg.sites:
        sid = site.site_id
        el = site.electrolyzer
        dsp_kg = dsp_demand(site) * dt  # kg per step
        for t in hours:
            b.eq(f"eq3[{sid}][t={t}]",
                 [("h_EL", sid, t, 1.0), ("p_EL", sid, t, -el.efficiency * dt)], 0.0)
            b.eq(f"eq4[{sid}][t={t}]",
                 [("p_Local", sid, t, 1.0), ("p_PPPA", sid, t, 1.0),
                  ("p_DAM_Buy", sid, t, 1.0), ("p_DAM_Sell", sid, t, -1.0),
                  ("p_EES", sid, t, -1.0), ("p_EL", sid, t, -1.0)], 0.0)
            local = (cfg.policy.wind_cf[t] * site.renewables.wind_capacity_mw
                     + cfg.policy.pv_cf[t] * site.renewables.pv_capacity_mw)
            b.eq(f"eq5[{sid}][t={t}]", [("p_Local", sid, t, 1.0)], local)
            # Operating window: the downstream draw fixes the lower bound.
            b.ge(f"eq6_lb[{sid}][t={t}]", [("p_EL", sid, t, 1.0)],
                 el.capacity_mw * (1.0 - el.flexibility_rate))
            b.le(f"eq6_ub[{sid}][t={t}]", [("p_EL", sid, t, 1.0)], el.capacity_mw)
            b.eq(f"eq7[{sid}][t={t}]", [("h_DSP", sid, t, 1.0)], dsp_kg)

    # --- market aggregation and buy/sell exclusivity -----------------------
    for t in hours:
        b.eq(f"eq10[t={t}]",
             [("p_DAM_Buy_pf", PORTFOLIO, t, 1.0)]
             + [("p_DAM_Buy", s.site_id, t, -1.0) for s in cfg.sites], 0.0)
        b.eq(f"eq11[t={t}]",
             [("p_DAM_Sell_pf", PORTFOLIO, t, 1.0)]
             + [("p_DAM_Sell", s.site_id, t, -1.0) for s in cfg.sites], 0.0)
    for site in cfg.sites:
        sid = site.site_id
        for t in hours:
            b.le(f"eq12[{sid}][t={t}]",
                 [("p_DAM_Buy", sid, t, 1.0), ("i_DAM_Buy", sid, t, -site.grid_limit_mw)], 0.0)
            b.le(f"eq13[{sid}][t={t}]",
                 [("p_DAM_Sell", sid, t, 1.0), ("i_DAM_Sell", sid, t, -site.grid_limit_mw)], 0.0)
            b.le(f"eq14[{sid}][t={t}]",
                 [("i_DAM_Buy", sid, t, 1.0), ("i_DAM_Sell", sid, t, 1.0)], 1.0)

    # --- storage ------------------------------------------------------------
    for site in cfg.sites:
        sid = site.site_id
        st = site.storage
        half = 0.5 * st.energy_max_mwh
        b.eq(f"boundary_soc_init[{sid}]", [("e_EES", sid, 0, 1.0)], half)
        b.eq(f"boundary_soc_final[{sid}]", [("e_EES", sid, T, 1.0)], half)
        for t in hours:
            b.eq(f"eq15[{sid}][t={t}]",
                 [("e_EES", sid, t + 1, 1.0), ("e_EES", sid, t, -1.0),
                  ("p_Ch", sid, t, -st.charge_efficiency * dt),
                  ("p_Dis", sid, t, dt / st.discharge_efficiency)], 0.0)
            b.le(f"eq16[{sid}][t={t}]",
                 [("p_Ch", sid, t, 1.0), ("i_EES_Ch", sid, t, -st.max_charge_mw)], 0.0)
            b.le(f"eq17[{sid}][t={t}]",
                 [("p_Dis", sid, t, 1.0), ("i_EES_Dis", sid, t, -st.max_discharge_mw)], 0.0)
            b.le(f"eq18[{sid}][t={t}]",
                 [("i_EES_Ch", sid, t, 1.0), ("i_EES_Dis", sid, t, 1.0)], 1.0)
            b.eq(f"eq19[{sid}][t={t}]",
                 [("p_EES", sid, t, 1.0), ("p_Ch", sid, t, -1.0), ("p_Dis", sid, t, 1.0)], 0.0)
        for t in range(T + 1):
            b.ge(f"eq20_lb[{sid}][t={t}]", [("e_EES", sid, t, 1.0)], st.energy_min_mwh)
            b.le(f"eq20_ub[{sid}][t={t}]", [("e_EES", sid, t, 1.0)], st.energy_max_mwh)

    # --- hydrogen balance and aggregation ------------------------------------
    for site in cfg.sites:
        sid = site.site_id
        for t in hours:
            b.eq(f"eq21[{sid}][t={t}]",
                 [("h_EL", sid, t, 1.0), ("h_BD", sid, t, -1.0),
                  ("h_UBD", sid, t, -1.0), ("h_DSP", sid, t, -1.0)], 0.0)
    for t in hours:
        b.eq(f"eq22[t={t}]",
             [("h_BD_pf", PORTFOLIO, t, 1.0)]
             + [("h_BD", s.site_id, t, -1.0) for s in cfg.sites], 0.0)
        b.eq(f"eq23[t={t}]",
             [("h_UBD_pf", PORTFOLIO, t, 1.0)]
             + [("h_UBD", s.site_id, t, -1.0) for s in cfg.sites], 0.0)

    # --- certificates ---------------------------------------------------------
    gamma = cfg.policy.go_conversion
    for site in cfg.sites:
        sid = site.site_id
        eff = site.electrolyzer.efficiency
        # Daily conservation: everything acquired is sold or retired.
        terms = []
        for t in hours:
            terms += [("n_GO_VPPA", sid, t, 1.0), ("n_GO_PPPA", sid, t, 1.0),
                      ("n_GO_Local", sid, t, 1.0), ("n_GO_Buy", sid, t, 1.0),
                      ("n_GO_Sell", sid, t, -1.0), ("n_GO_BD", sid, t, -1.0),
                      ("n_GO_DSP", sid, t, -1.0)]
        b.eq(f"eq24[{sid}]", terms, 0.0)
        for t in hours:
            b.eq(f"eq25[{sid}][t={t}]",
                 [("n_GO_VPPA", sid, t, 1.0), ("p_VPPA", sid, t, -gamma * dt)], 0.0)
            b.eq(f"eq26[{sid}][t={t}]",
                 [("n_GO_PPPA", sid, t, 1.0), ("p_PPPA", sid, t, -gamma * dt)], 0.0)
            b.eq(f"eq27[{sid}][t={t}]",
                 [("n_GO_Local", sid, t, 1.0), ("p_Local", sid, t, -gamma * dt)], 0.0)
            b.eq(f"eq28[{sid}][t={t}]",
                 [("n_GO_BD", sid, t, 1.0), ("h_BD", sid, t, -gamma / eff)], 0.0)
            b.eq(f"eq29[{sid}][t={t}]",
                 [("n_GO_DSP", sid, t, 1.0), ("h_DSP", sid, t, -gamma / eff)], 0.0)
            # Trade gating: the daily caps are valid hourly bounds (eq36/37).
            b.le(f"eq31[{sid}][t={t}]",
                 [("n_GO_Sell", sid, t, 1.0), ("i_GO_Sell", sid, t, -cfg.policy.go_sell_cap)], 0.0)
            b.le(f"eq32[{sid}][t={t}]",
                 [("n_GO_Buy", sid, t, 1.0), ("i_GO_Buy", sid, t, -cfg.policy.go_buy_cap)], 0.0)
            b.le(f"eq33[{sid}][t={t}]",
                 [("i_GO_Sell", sid, t, 1.0), ("i_GO_Buy", sid, t, 1.0)], 1.0)
    for t in hours:
        b.eq(f"eq34[t={t}]",
             [("n_GO_Sell_pf", PORTFOLIO, t, 1.0)]
             + [("n_GO_Sell", s.site_id, t, -1.0) for s in cfg.sites], 0.0)
        b.eq(f"eq35[t={t}]",
             [("n_GO_Buy_pf", PORTFOLIO, t, 1.0)]
             + [("n_GO_Buy", s.site_id, t, -1.0) for s in cfg.sites], 0.0)
    b.le("eq36", [("n_GO_Buy", s.site_id, t, 1.0) for s in cfg.sites for t in hours],
         cfg.policy.go_buy_cap)
    b.le("eq37", [("n_GO_Sell", s.site_id, t, 1.0) for s in cfg.sites for t in hours],
         cfg.policy.go_sell_cap)

    return b.finish(scoped=False)


def scope_constraints(case: CaseConfig, model: MilpProblem) -> MilpProblem:
    """Add the case-dependent PPA pinning and green-floor rows.

    `model` must come from :func:`build_unscoped_model`.  All cases pin the
    portfolio PPA quantities to the contracted profiles (take-as-produced);
    per-site PPA scope additionally fixes each site's share, and the green
    floor lands either on every site or once on the whole portfolio.
    """
    if model.scoped:
        raise ValueError("model already carries scoped constraints")
    cfg = model.scenario
    T = cfg.grid.step_count
    dt = cfg.grid.step_hours
    gamma = cfg.policy.go_conversion
    rows: list[Constraint] = []

    def eq(tag, terms, rhs, relation="="):
        rows.append(Constraint(tag, tuple((var_name(k, s, t), c) for k, s, t, c in terms),
                               relation, rhs))

    for t in range(T):
        eq(f"eq8[t={t}]",
           [("p_PPPA", s.site_id, t, 1.0) for s in cfg.sites]
           + [("P_PPPA_pf", PORTFOLIO, t, -1.0)], 0.0)
        eq(f"eq9[t={t}]",
           [("p_VPPA", s.site_id, t, 1.0) for s in cfg.sites]
           + [("P_VPPA_pf", PORTFOLIO, t, -1.0)], 0.0)
        eq(f"eq8_profile[t={t}]", [("P_PPPA_pf", PORTFOLIO, t, 1.0)],
           cfg.contracts.physical_ppa_profile[t])
        eq(f"eq9_profile[t={t}]", [("P_VPPA_pf", PORTFOLIO, t, 1.0)],
           cfg.contracts.virtual_ppa_profile[t])

    if case.ppa_scope is Scope.PER_SITE:
        split = case.per_site_ppa_profiles
        if split is None:
            raise ScenarioError([Violation("case.per_site_ppa_profiles",
                                           "required when ppa_scope is per_site")])
        for site in cfg.sites:
            sid = site.site_id
            if sid not in split:
                raise ScenarioError([Violation(f"case.per_site_ppa_profiles[{sid}]",
                                               "missing split for site")])
            pair = split[sid]
            for t in range(T):
                eq(f"eq8_site[{sid}][t={t}]", [("p_PPPA", sid, t, 1.0)], pair.physical[t])
                eq(f"eq9_site[{sid}][t={t}]", [("p_VPPA", sid, t, 1.0)], pair.virtual[t])

    def green_terms(sites):
        terms = []
        for site in sites:
            sid = site.site_id
            eff = site.electrolyzer.efficiency
            for t in range(T):
                terms += [("n_GO_VPPA", sid, t, 1.0 / gamma), ("n_GO_PPPA", sid, t, 1.0 / gamma),
                          ("n_GO_Local", sid, t, 1.0 / gamma), ("n_GO_Buy", sid, t, 1.0 / gamma),
                          ("n_GO_Sell", sid, t, -1.0 / gamma),
                          ("h_BD", sid, t, -cfg.policy.green_share / eff),
                          ("h_UBD", sid, t, -cfg.policy.green_share / eff),
                          ("h_DSP", sid, t, -cfg.policy.green_share / eff)]
        return terms

    if case.green_target_scope is Scope.PER_SITE:
        for site in cfg.sites:
            eq(f"eq30[{site.site_id}]", green_terms([site]), 0.0, relation=">=")
    else:
        eq(f"eq30[{PORTFOLIO}]", green_terms(cfg.sites), 0.0, relation=">=")

    scoped_case = CaseConfig(case.ppa_scope, case.green_target_scope, case.per_site_ppa_profiles)
    scenario = cfg if cfg.case == scoped_case else ScenarioConfig(
        cfg.grid, cfg.sites, cfg.contracts, cfg.prices, cfg.policy, scoped_case)
    return MilpProblem(
        scenario=scenario,
        variables=model.variables,
        constraints=model.constraints + rows,
        objective=model.objective,
        scoped=True,
    )


class _Emitter:
    """Accumulates variables and rows in deterministic order."""

    def __init__(self, cfg: ScenarioConfig) -> None:
        self.cfg = cfg
        self.variables: list[VariableRef] = []
        self.constraints: list[Constraint] = []
        self.objective: tuple[tuple[str, float], ...] = ()

    def add_var(self, kind, scope, hour, lower, upper, integrality) -> None:
        self.variables.append(VariableRef(kind, scope, hour, lower, upper, integrality))

    def _row(self, tag, terms, relation, rhs) -> None:
        self.constraints.append(
            Constraint(tag, tuple((var_name(k, s, t), c) for k, s, t, c in terms),
                       relation, float(rhs)))

    def eq(self, tag, terms, rhs) -> None:
        self._row(tag, terms, "=", rhs)

    def le(self, tag, terms, rhs) -> None:
        self._row(tag, terms, "<=", rhs)

    def ge(self, tag, terms, rhs) -> None:
        self._row(tag, terms, ">=", rhs)

    def finish(self, scoped: bool) -> MilpProblem:
        problem = MilpProblem(
            scenario=self.cfg,
            variables=self.variables,
            constraints=self.constraints,
            objective=self.objective,
            scoped=scoped,
        )
        _check_references(problem)
        return problem


def _check_references(problem: MilpProblem) -> None:
    index = problem.var_index
    for c in problem.constraints:
        for name, _ in c.terms:
            if name not in index:
                raise AssertionError(f"constraint {c.tag} references undeclared {name}")


@dataclass(frozen=True)
class CostBreakdown:
    """The five signed components of the daily objective, in EUR.

    `profit` (the maximized objective) is hydrogen_revenue minus the four
    cost components; `net_cost` flips the sign to the reporting convention
    where positive numbers are money spent.
    """

    hydrogen_revenue: float
    go_net_cost: float
    dam_net_cost: float
    pppa_cost: float
    cfd_cost: float

    @property
    def profit(self) -> float:
        return (self.hydrogen_revenue - self.go_net_cost - self.dam_net_cost
                - self.pppa_cost - self.cfd_cost)

    @property
    def net_cost(self) -> float:
        return -self.profit


def objective_breakdown(cfg: ScenarioConfig, sol) -> CostBreakdown:
    """Decompose a solution's objective into its five market components.

    Recomputed from the variable assignment and the scenario's prices; the
    signed sum reproduces the solver objective (checked by the test-suite to
    1e-6 relative).
    """
    if not getattr(sol, "assignment", None):
        raise ValueError("objective_breakdown needs a solution with a variable assignment")
    a = sol.assignment
    ct, pr = cfg.contracts, cfg.prices
    dt = cfg.grid.step_hours
    pppa_unit_cost = (1.0 + ct.loss_rate) * ct.physical_ppa_price + ct.grid_access_tariff

    def tot(kind: str) -> float:
        return sum(a[var_name(kind, PORTFOLIO, t)] for t in range(cfg.grid.step_count))

    def price_tot(kind: str, prices) -> float:
        return sum(prices[t] * a[var_name(kind, PORTFOLIO, t)] for t in range(cfg.grid.step_count))

    return CostBreakdown(
        hydrogen_revenue=pr.bundled_h2 * tot("h_BD_pf") + pr.unbundled_h2 * tot("h_UBD_pf"),
        go_net_cost=pr.go_buy * tot("n_GO_Buy_pf") - pr.go_sell * tot("n_GO_Sell_pf"),
        dam_net_cost=(price_tot("p_DAM_Buy_pf", pr.dam_buy)
                      - price_tot("p_DAM_Sell_pf", pr.dam_sell)) * dt,
        pppa_cost=pppa_unit_cost * tot("P_PPPA_pf") * dt,
        cfd_cost=tot("c_CfD"),
    )


def expected_variable_count(n_sites: int, n_hours: int) -> int:
    """Closed-form census: 26 site-hour vars + (T+1) SoC points per site + 9 portfolio vars per hour."""
    per_site_hour = len(SITE_HOUR_KINDS) + len(BINARY_KINDS)
    return n_sites * n_hours * per_site_hour + n_sites * (n_hours + 1) + len(PORTFOLIO_KINDS) * n_hours


def expected_family_counts(n_sites: int, n_hours: int, case: CaseConfig) -> dict[str, int]:
    """Closed-form constraint census by row family (see docs/model_reference.md)."""
    E, T = n_sites, n_hours
    counts = {
        "eq2": T, "eq3": E * T, "eq4": E * T, "eq5": E * T,
        "eq6_lb": E * T, "eq6_ub": E * T, "eq7": E * T,
        "eq8": T, "eq9": T, "eq8_profile": T, "eq9_profile": T,
        "eq10": T, "eq11": T, "eq12": E * T, "eq13": E * T, "eq14": E * T,
        "eq15": E * T, "boundary_soc_init": E, "boundary_soc_final": E,
        "eq16": E * T, "eq17": E * T, "eq18": E * T, "eq19": E * T,
        "eq20_lb": E * (T + 1), "eq20_ub": E * (T + 1),
        "eq21": E * T, "eq22": T, "eq23": T,
        "eq24": E,
        "eq25": E * T, "eq26": E * T, "eq27": E * T, "eq28": E * T, "eq29": E * T,
        "eq31": E * T, "eq32": E * T, "eq33": E * T,
        "eq34": T, "eq35": T, "eq36": 1, "eq37": 1,
    }
    if case.ppa_scope is Scope.PER_SITE:
        counts["eq8_site"] = E * T
        counts["eq9_site"] = E * T
    counts["eq30"] = E if case.green_target_scope is Scope.PER_SITE else 1
    return counts
