import pytest

from h2portfolio.fixtures import random_scenario
from h2portfolio.lp_format import lp_string, write_lp
from h2portfolio.model import build_model
from h2portfolio.runner import with_case


@pytest.fixture(scope="module")
def problem():
    return build_model(with_case(random_scenario(0, n_sites=2, n_hours=6), 1))


def test_sections_in_order(problem):
    text = lp_string(problem)
    positions = [text.index(s) for s in ("Maximize", "Subject To", "Bounds", "Binary", "End")]
    assert positions == sorted(positions)


def test_one_row_per_constraint(problem):
    text = lp_string(problem)
    body = text.split("Subject To")[1].split("Bounds")[0]
    rows = [line for line in body.splitlines() if ":" in line]
    assert len(rows) == len(problem.constraints)


def test_binary_section_lists_every_binary(problem):
    text = lp_string(problem)
    body = text.split("Binary")[1].split("End")[0]
    names = [line.strip() for line in body.splitlines() if line.strip()]
    assert len(names) == len(problem.binaries())
    assert len(set(names)) == len(names)


def test_free_variables_are_declared(problem):
    text = lp_string(problem)
    bounds = text.split("Bounds")[1].split("Binary")[0]
    free_lines = [line for line in bounds.splitlines() if line.endswith(" free")]
    free_vars = [v for v in problem.variables if v.lower == float("-inf")]
    assert len(free_lines) == len(free_vars)


def test_names_are_sanitized_and_unique(problem):
    text = lp_string(problem)
    assert "[" not in text and "=" not in text.split("Subject To")[0]
    body = text.split("Subject To")[1].split("Bounds")[0]
    row_names = [line.split(":")[0].strip() for line in body.splitlines() if ":" in line]
    assert len(set(row_names)) == len(row_names)


def test_output_is_deterministic_and_writable(problem, tmp_path):
    assert lp_string(problem) == lp_string(problem)
    path = write_lp(problem, tmp_path / "model.lp")
    assert path.read_text(encoding="utf-8") == lp_string(problem)
