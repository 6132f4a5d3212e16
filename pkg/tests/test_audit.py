import csv

import pytest

from h2portfolio.audit import audit, green_share
from h2portfolio.fixtures import random_scenario
from h2portfolio.model import build_model
from h2portfolio.runner import with_case
from h2portfolio.solver import Solution, SolveStatus, StatusKind, solve

from conftest import make_unit_scenario, unit_feasible_assignment


def as_solution(cfg, assignment):
    return Solution(SolveStatus(StatusKind.OPTIMAL), None, assignment, cfg)


class TestHandBuiltAssignment:
    def test_hand_built_feasible_point_passes_every_row(self, unit_scenario):
        report = audit(unit_scenario, as_solution(unit_scenario, unit_feasible_assignment()))
        assert report.ok, report.failures()[:3]
        assert report.worst_residual <= 1e-12
        assert report.green_share == pytest.approx(1.0)

    def test_perturbed_electrolyzer_power_fails_exactly_the_coupled_rows(self, unit_scenario):
        bumped = dict(unit_feasible_assignment())
        bumped["p_EL[s1][0]"] += 0.5
        report = audit(unit_scenario, as_solution(unit_scenario, bumped))
        assert not report.ok
        assert report.failing_families() == {"eq3", "eq4"}

    def test_missing_variable_produces_error_entry_naming_it(self, unit_scenario):
        partial = dict(unit_feasible_assignment())
        del partial["p_EL[s1][0]"]
        report = audit(unit_scenario, as_solution(unit_scenario, partial))
        assert not report.ok
        errors = [e for e in report.entries if e.family == "error"]
        assert len(errors) == 1 and errors[0].scope == "p_EL[s1][0]"


class TestSolverSolutionsPass:
    @pytest.mark.parametrize("case", [1, 2, 3])
    def test_optimal_solutions_audit_clean(self, case):
        cfg = with_case(random_scenario(case, n_sites=3, n_hours=24), case)
        sol = solve(build_model(cfg))
        assert sol.status.is_optimal
        report = audit(cfg, sol, tol=1e-6)
        assert report.ok, report.failures()[:5]

    @pytest.mark.parametrize("case", [1, 3])
    def test_audit_census_matches_builder_census(self, case):
        cfg = with_case(random_scenario(9, n_sites=4, n_hours=12), case)
        problem = build_model(cfg)
        sol = solve(problem)
        report = audit(cfg, sol)
        assert sorted(e.tag for e in report.entries) == sorted(problem.tags())


class TestGreenShare:
    def test_full_coverage_reports_one(self, unit_scenario):
        sol = solve(build_model(unit_scenario))
        assert green_share(unit_scenario, sol) == pytest.approx(1.0, abs=1e-9)

    def test_zero_production_reports_none(self):
        import dataclasses

        cfg = make_unit_scenario()
        site = cfg.sites[0]
        flexible = dataclasses.replace(site.electrolyzer, flexibility_rate=1.0)
        prices = dataclasses.replace(cfg.prices, bundled_h2=0.0, unbundled_h2=0.0)
        idle = dataclasses.replace(
            cfg, sites=(dataclasses.replace(site, electrolyzer=flexible),), prices=prices)
        sol = solve(build_model(idle))
        assert sol.status.is_optimal
        assert green_share(idle, sol) is None
        assert sol.portfolio_summary.green_share is None


class TestReportOutputs:
    def test_csv_round_trip(self, tmp_path, unit_scenario):
        sol = solve(build_model(unit_scenario))
        report = audit(unit_scenario, sol)
        out = tmp_path / "audit.csv"
        report.to_csv(out)
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(report.entries)
        assert set(rows[0]) == {"tag", "scope", "hour", "residual", "tolerance", "passed"}

    def test_verdict_line_formats(self, unit_scenario):
        sol = solve(build_model(unit_scenario))
        report = audit(unit_scenario, sol)
        assert report.verdict_line().startswith("AUDIT PASS")
        bumped = dict(unit_feasible_assignment())
        bumped["p_EL[s1][0]"] += 0.5
        failing = audit(unit_scenario, as_solution(unit_scenario, bumped))
        assert failing.verdict_line().startswith("AUDIT FAIL")
