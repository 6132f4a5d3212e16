import json

import pytest

from h2portfolio.fixtures import random_scenario
from h2portfolio.runner import with_case
from h2portfolio.scenario_io import (
    ScenarioFormatError,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)


class TestRoundTrip:
    def test_json_round_trip_is_exact(self, tmp_path):
        cfg = random_scenario(0, n_sites=3)
        path = save_scenario(cfg, tmp_path / "scenario.json")
        assert load_scenario(path) == cfg

    def test_round_trip_keeps_per_site_split(self, tmp_path):
        cfg = with_case(random_scenario(1, n_sites=2), 1)
        path = save_scenario(cfg, tmp_path / "scenario.json")
        loaded = load_scenario(path)
        assert loaded.case.per_site_ppa_profiles == cfg.case.per_site_ppa_profiles
        assert loaded.case.case_number() == 1

    def test_series_can_come_from_csv_files(self, tmp_path):
        cfg = random_scenario(2, n_sites=2)
        doc = scenario_to_dict(cfg)
        series = doc["prices"]["dam_buy"]
        csv_path = tmp_path / "dam_buy.csv"
        csv_path.write_text(
            "hour,value\n" + "\n".join(f"{t},{x!r}" for t, x in enumerate(series)) + "\n")
        doc["prices"]["dam_buy"] = {"csv": "dam_buy.csv"}
        scenario_path = tmp_path / "scenario.json"
        scenario_path.write_text(json.dumps(doc))
        loaded = load_scenario(scenario_path)
        assert loaded.prices.dam_buy == cfg.prices.dam_buy


class TestFormatErrors:
    def base_doc(self):
        return scenario_to_dict(random_scenario(3, n_sites=2))

    def test_missing_series_names_the_field(self):
        doc = self.base_doc()
        del doc["prices"]["dam_buy"]
        with pytest.raises(ScenarioFormatError) as err:
            scenario_from_dict(doc)
        assert err.value.field == "prices.dam_buy"

    def test_non_numeric_element_names_the_field(self):
        doc = self.base_doc()
        doc["policy"]["wind_cf"][5] = "breezy"
        with pytest.raises(ScenarioFormatError) as err:
            scenario_from_dict(doc)
        assert err.value.field == "policy.wind_cf"

    def test_bad_scope_value_is_rejected(self):
        doc = self.base_doc()
        doc["case"]["ppa_scope"] = "regional"
        with pytest.raises(ScenarioFormatError, match="per_site"):
            scenario_from_dict(doc)

    def test_missing_sites_array(self):
        doc = self.base_doc()
        doc["sites"] = []
        with pytest.raises(ScenarioFormatError) as err:
            scenario_from_dict(doc)
        assert err.value.field == "sites"

    def test_missing_csv_file_names_the_field(self, tmp_path):
        doc = self.base_doc()
        doc["prices"]["dam_sell"] = {"csv": "nowhere.csv"}
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ScenarioFormatError) as err:
            load_scenario(path)
        assert err.value.field == "prices.dam_sell"

    def test_invalid_json_reports_the_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioFormatError, match="not valid JSON"):
            load_scenario(path)
