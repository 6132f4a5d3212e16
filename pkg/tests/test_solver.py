import numpy as np
import pytest

from h2portfolio.fixtures import random_scenario, tiny_scenario
from h2portfolio.model import (
    Constraint,
    Integrality,
    MilpProblem,
    VariableRef,
    build_model,
)
from h2portfolio.runner import with_case
from h2portfolio.solver import (
    SolveOptions,
    StatusKind,
    fix_binaries_and_resolve,
    get_backend,
    solve,
)

INF = float("inf")


def raw_problem(variables, constraints, objective=()):
    return MilpProblem(scenario=None, variables=variables, constraints=constraints,
                       objective=tuple(objective), scoped=True)


class TestBackendContract:
    def test_empty_objective_feasible_model_is_optimal_at_zero(self):
        problem = raw_problem(
            variables=[
                VariableRef("x", "A", 0, 0.0, 10.0, Integrality.CONTINUOUS),
                VariableRef("y", "A", 0, 0.0, 10.0, Integrality.CONTINUOUS),
            ],
            constraints=[Constraint("cap", (("x[A][0]", 1.0), ("y[A][0]", 1.0)), "<=", 5.0)],
        )
        sol = solve(problem)
        assert sol.status.kind is StatusKind.OPTIMAL
        assert sol.objective_value == pytest.approx(0.0, abs=1e-12)
        assert set(sol.assignment) == {"x[A][0]", "y[A][0]"}

    def test_contradictory_bounds_are_infeasible(self):
        problem = raw_problem(
            variables=[VariableRef("x", "A", 0, -INF, INF, Integrality.CONTINUOUS)],
            constraints=[
                Constraint("lo", (("x[A][0]", 1.0),), ">=", 1.0),
                Constraint("hi", (("x[A][0]", 1.0),), "<=", 0.0),
            ],
        )
        sol = solve(problem)
        assert sol.status.kind is StatusKind.INFEASIBLE
        assert sol.assignment == {}

    def test_unknown_backend_is_rejected(self):
        with pytest.raises(ValueError, match="unknown solver backend"):
            get_backend("cplex-cloud")

    def test_backend_env_variable_is_honored(self, monkeypatch):
        monkeypatch.setenv("H2PORTFOLIO_BACKEND", "highs")
        assert type(get_backend()).__name__ == "ScipyHighsBackend"

    def test_options_are_validated(self):
        with pytest.raises(ValueError):
            SolveOptions(relative_gap=-1.0)
        with pytest.raises(ValueError):
            SolveOptions(time_limit_s=0.0)


class TestSolveOnScenarios:
    def test_binaries_land_on_integers(self):
        problem = build_model(with_case(random_scenario(0, n_sites=2, n_hours=24), 3))
        sol = solve(problem)
        assert sol.status.is_optimal
        for ref in problem.binaries():
            value = sol.assignment[ref.name]
            assert abs(value - round(value)) <= 1e-6

    def test_repeat_solves_are_deterministic(self, unit_scenario):
        cfg = with_case(random_scenario(1, n_sites=3, n_hours=24), 2)
        first = solve(build_model(cfg)).objective_value
        second = solve(build_model(cfg)).objective_value
        assert second == pytest.approx(first, rel=1e-9)

    def test_small_fixture_agrees_with_enumeration(self):
        from h2portfolio.oracle import oracle_solve

        cfg = tiny_scenario(seed=11, n_sites=1, n_hours=2, storage=False)
        milp_obj = solve(build_model(cfg)).objective_value
        oracle_obj = oracle_solve(cfg).objective
        assert milp_obj == pytest.approx(oracle_obj, rel=1e-6)


class TestFixBinaries:
    def test_pattern_must_cover_every_binary(self, unit_scenario):
        problem = build_model(unit_scenario)
        with pytest.raises(ValueError, match="misses"):
            fix_binaries_and_resolve(problem, {})

    def test_pattern_values_must_be_binary(self, unit_scenario):
        problem = build_model(unit_scenario)
        pattern = {ref.name: 0 for ref in problem.binaries()}
        pattern[next(iter(pattern))] = 2
        with pytest.raises(ValueError, match="0 or 1"):
            fix_binaries_and_resolve(problem, pattern)

    def test_all_zeros_infeasible_when_demand_needs_market_power(self):
        # No local generation and a 3 MW PPA against a 5 MW electrolyzer
        # floor: the missing energy has to be bought, which the pattern forbids.
        from conftest import make_unit_scenario

        cfg = make_unit_scenario(wind_capacity=0.0)
        problem = build_model(cfg)
        pattern = {ref.name: 0 for ref in problem.binaries()}
        sol = fix_binaries_and_resolve(problem, pattern)
        assert sol.status.kind is StatusKind.INFEASIBLE

    def test_simultaneous_charge_discharge_pattern_rejected_by_exclusivity(self, unit_scenario):
        problem = build_model(unit_scenario)
        pattern = {ref.name: 0 for ref in problem.binaries()}
        pattern["i_EES_Ch[s1][0]"] = 1
        pattern["i_EES_Dis[s1][0]"] = 1
        sol = fix_binaries_and_resolve(problem, pattern)
        assert sol.status.kind is StatusKind.INFEASIBLE
        assert "eq18" in sol.status.message

    def test_optimal_pattern_reproduces_milp_objective(self):
        cfg = tiny_scenario(seed=5, n_sites=1, n_hours=2, storage=True)
        problem = build_model(cfg)
        milp = solve(problem)
        assert milp.status.is_optimal
        pattern = {ref.name: int(round(milp.assignment[ref.name]))
                   for ref in problem.binaries()}
        fixed = fix_binaries_and_resolve(problem, pattern)
        assert fixed.status.is_optimal
        assert fixed.objective_value == pytest.approx(milp.objective_value, rel=1e-6)
        for ref in problem.binaries():
            assert fixed.assignment[ref.name] == pattern[ref.name]


class TestSolutionDerivations:
    def test_summary_recomputed_from_assignment(self):
        cfg = with_case(random_scenario(2, n_sites=3, n_hours=24), 3)
        sol = solve(build_model(cfg))
        s = sol.portfolio_summary
        dt = cfg.grid.step_hours
        assert s.pppa_mwh == pytest.approx(sum(cfg.contracts.physical_ppa_profile) * dt, rel=1e-9)
        assert s.vppa_mwh == pytest.approx(sum(cfg.contracts.virtual_ppa_profile) * dt, rel=1e-9)
        assert s.net_cost_eur == pytest.approx(-sol.objective_value, rel=1e-9)
        assert s.bundled_rev_eur == pytest.approx(cfg.prices.bundled_h2 * s.bundled_kg, rel=1e-9)

    def test_schedule_tables_have_one_row_per_hour(self):
        cfg = with_case(random_scenario(3, n_sites=2, n_hours=24), 2)
        sol = solve(build_model(cfg))
        assert set(sol.per_site_schedule) == {s.site_id for s in cfg.sites}
        for frame in sol.per_site_schedule.values():
            assert len(frame) == 24
            assert "p_EL" in frame.columns and "e_EES" in frame.columns

    def test_storage_telescoping_is_closed_by_the_boundaries(self):
        # SoC change over the day telescopes to the net charge flow; the 50%
        # start/end pins make that flow integrate to zero.
        cfg = with_case(random_scenario(5, n_sites=3, n_hours=24), 3)
        sol = solve(build_model(cfg))
        dt = cfg.grid.step_hours
        for site in cfg.sites:
            frame = sol.per_site_schedule[site.site_id]
            st = site.storage
            net = (st.charge_efficiency * frame["p_Ch"]
                   - frame["p_Dis"] / st.discharge_efficiency).sum() * dt
            assert net == pytest.approx(0.0, abs=1e-6)

    def test_mutual_exclusivity_invariants_hold(self):
        cfg = with_case(random_scenario(4, n_sites=3, n_hours=24), 3)
        sol = solve(build_model(cfg))
        for site in cfg.sites:
            frame = sol.per_site_schedule[site.site_id]
            gate = 1e-6 * max(1.0, site.grid_limit_mw)
            assert (np.minimum(frame["p_DAM_Buy"], frame["p_DAM_Sell"]) <= gate).all()
            assert (np.minimum(frame["p_Ch"], frame["p_Dis"]) <= gate).all()
            assert (np.minimum(frame["n_GO_Buy"], frame["n_GO_Sell"])
                    <= 1e-6 * max(1.0, cfg.policy.go_buy_cap)).all()
