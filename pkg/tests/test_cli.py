import csv
import dataclasses
import json
from pathlib import Path

import pytest

from h2portfolio.cli import main
from h2portfolio.domain import validate_scenario
from h2portfolio.fixtures import random_scenario
from h2portfolio.scenario_io import load_scenario, save_scenario

from conftest import make_infeasible_scenario, make_unit_scenario


def write_raw_dir(cfg, raw: Path, green_share=None) -> Path:
    """Lay a scenario out in the raw ingest format."""
    raw.mkdir(parents=True, exist_ok=True)
    with open(raw / "sites.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "site_id", "efficiency", "capacity_mw", "flexibility_rate",
            "wind_capacity_mw", "pv_capacity_mw", "charge_efficiency",
            "discharge_efficiency", "max_charge_mw", "max_discharge_mw",
            "energy_min_mwh", "energy_max_mwh", "grid_limit_mw"])
        for s in cfg.sites:
            writer.writerow([
                s.site_id, repr(s.electrolyzer.efficiency), repr(s.electrolyzer.capacity_mw),
                repr(s.electrolyzer.flexibility_rate), repr(s.renewables.wind_capacity_mw),
                repr(s.renewables.pv_capacity_mw), repr(s.storage.charge_efficiency),
                repr(s.storage.discharge_efficiency), repr(s.storage.max_charge_mw),
                repr(s.storage.max_discharge_mw), repr(s.storage.energy_min_mwh),
                repr(s.storage.energy_max_mwh), repr(s.grid_limit_mw)])
    with open(raw / "series.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hour", "dam_buy", "dam_sell", "wind_cf", "pv_cf",
                         "physical_ppa_mw", "virtual_ppa_mw"])
        for t in range(cfg.grid.step_count):
            writer.writerow([t, repr(cfg.prices.dam_buy[t]), repr(cfg.prices.dam_sell[t]),
                             repr(cfg.policy.wind_cf[t]), repr(cfg.policy.pv_cf[t]),
                             repr(cfg.contracts.physical_ppa_profile[t]),
                             repr(cfg.contracts.virtual_ppa_profile[t])])
    market = {
        "physical_ppa_price": cfg.contracts.physical_ppa_price,
        "virtual_ppa_strike": cfg.contracts.virtual_ppa_strike,
        "grid_access_tariff": cfg.contracts.grid_access_tariff,
        "loss_rate": cfg.contracts.loss_rate,
        "bundled_h2": cfg.prices.bundled_h2,
        "unbundled_h2": cfg.prices.unbundled_h2,
        "go_sell": cfg.prices.go_sell,
        "go_buy": cfg.prices.go_buy,
        "green_share": cfg.policy.green_share if green_share is None else green_share,
        "go_conversion": cfg.policy.go_conversion,
        "go_buy_cap": cfg.policy.go_buy_cap,
        "go_sell_cap": cfg.policy.go_sell_cap,
        "step_hours": cfg.grid.step_hours,
    }
    (raw / "market.json").write_text(json.dumps(market, indent=1))
    return raw


@pytest.fixture
def scenario_file(tmp_path):
    return save_scenario(random_scenario(0, n_sites=2, n_hours=24), tmp_path / "scenario.json")


class TestSolveCommand:
    def test_happy_path_writes_everything(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "run"
        code = main(["solve", "--scenario", str(scenario_file), "--case", "3",
                     "--out", str(out)])
        assert code == 0
        for name in ("solution.json", "audit.csv", "summary.csv", "manifest.json"):
            assert (out / name).exists()
        assert (out / "schedules" / "portfolio.csv").exists()
        assert "AUDIT PASS" in capsys.readouterr().out

    def test_validation_error_exits_4_and_names_field(self, tmp_path, capsys):
        cfg = make_unit_scenario()
        site = cfg.sites[0]
        storage = dataclasses.replace(site.storage, energy_min_mwh=9.0, energy_max_mwh=4.0)
        bad = dataclasses.replace(cfg, sites=(dataclasses.replace(site, storage=storage),))
        path = save_scenario(bad, tmp_path / "bad.json")
        code = main(["solve", "--scenario", str(path), "--case", "3",
                     "--out", str(tmp_path / "o")])
        assert code == 4
        assert "energy_min_mwh" in capsys.readouterr().err

    def test_infeasible_scenario_exits_2(self, tmp_path, capsys):
        path = save_scenario(make_infeasible_scenario(), tmp_path / "infeasible.json")
        code = main(["solve", "--scenario", str(path), "--case", "3",
                     "--out", str(tmp_path / "o")])
        assert code == 2
        assert "infeasible" in capsys.readouterr().err

    def test_unreadable_scenario_exits_4(self, tmp_path, capsys):
        code = main(["solve", "--scenario", str(tmp_path / "missing.json"),
                     "--case", "1", "--out", str(tmp_path / "o")])
        assert code == 4


class TestCompareCommand:
    def test_three_cases_and_byte_identical_reruns(self, tmp_path, scenario_file):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["compare", "--scenario", str(scenario_file), "--out", str(out1)]) == 0
        assert main(["compare", "--scenario", str(scenario_file), "--out", str(out2)]) == 0
        first = (out1 / "summary.csv").read_bytes()
        second = (out2 / "summary.csv").read_bytes()
        assert first == second
        assert len(first.decode().strip().splitlines()) == 4
        for case in (1, 2, 3):
            assert (out1 / f"audit_case{case}.csv").exists()
            assert (out1 / f"schedules_case{case}" / "portfolio.csv").exists()


class TestAuditCommand:
    def test_stored_solution_passes(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "run"
        assert main(["solve", "--scenario", str(scenario_file), "--case", "2",
                     "--out", str(out)]) == 0
        capsys.readouterr()
        solved = load_scenario(scenario_file)
        from h2portfolio.runner import with_case
        from h2portfolio.scenario_io import save_scenario as save

        case2 = save(with_case(solved, 2), tmp_path / "case2.json")
        code = main(["audit", "--scenario", str(case2),
                     "--solution", str(out / "solution.json"), "--tol", "1e-6"])
        assert code == 0
        assert "AUDIT PASS" in capsys.readouterr().out

    def test_corrupted_solution_exits_3(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "run"
        assert main(["solve", "--scenario", str(scenario_file), "--case", "2",
                     "--out", str(out)]) == 0
        doc = json.loads((out / "solution.json").read_text())
        key = next(k for k in doc["assignment"] if k.startswith("p_EL["))
        doc["assignment"][key] += 0.5
        broken = tmp_path / "broken.json"
        broken.write_text(json.dumps(doc))
        from h2portfolio.runner import with_case

        case2 = save_scenario(with_case(load_scenario(scenario_file), 2),
                              tmp_path / "case2.json")
        code = main(["audit", "--scenario", str(case2), "--solution", str(broken)])
        assert code == 3


class TestIngestCommand:
    def test_round_trip_produces_valid_scenario(self, tmp_path):
        cfg = random_scenario(1, n_sites=3, n_hours=24)
        raw = write_raw_dir(cfg, tmp_path / "raw")
        out = tmp_path / "converted.json"
        assert main(["ingest", "--raw", str(raw), "--out", str(out)]) == 0
        converted = load_scenario(out)
        assert validate_scenario(converted) == []
        assert converted.prices.dam_buy == cfg.prices.dam_buy
        assert converted.contracts.physical_ppa_profile == cfg.contracts.physical_ppa_profile

    def test_missing_price_column_exits_4(self, tmp_path, capsys):
        cfg = random_scenario(2, n_sites=2, n_hours=6)
        raw = write_raw_dir(cfg, tmp_path / "raw")
        series = (raw / "series.csv").read_text().splitlines()
        header = series[0].replace("dam_sell,", "")
        rows = [",".join(col for i, col in enumerate(line.split(",")) if i != 2)
                for line in series[1:]]
        (raw / "series.csv").write_text("\n".join([header] + rows) + "\n")
        code = main(["ingest", "--raw", str(raw), "--out", str(tmp_path / "x.json")])
        assert code == 4
        assert "dam_sell" in capsys.readouterr().err

    def test_converted_scenario_meets_green_floor_in_case_1(self, tmp_path):
        cfg = random_scenario(3, n_sites=2, n_hours=24)
        raw = write_raw_dir(cfg, tmp_path / "raw", green_share=0.9)
        out = tmp_path / "converted.json"
        assert main(["ingest", "--raw", str(raw), "--out", str(out)]) == 0
        from h2portfolio.audit import green_share
        from h2portfolio.runner import run_case

        converted = load_scenario(out)
        outcome = run_case(converted, 1)
        assert outcome.solved
        assert green_share(outcome.solution.scenario, outcome.solution) >= 0.9 - 1e-6
