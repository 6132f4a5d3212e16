"""Run the three compliance setups on one scenario and compare them.

Provides the case plumbing (scope presets, default per-site PPA split),
CSV exports of schedules, and the one-row-per-case summary table used by
the command line front end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .audit import AuditReport, audit
from .domain import CASE_SCOPES, CaseConfig, PpaSplit, ScenarioConfig, validate_scenario
from .model import ScenarioError, build_model
from .solver import PortfolioSummary, Solution, SolveOptions, solve

# Relative slack when comparing profits across nested cases.
ORDERING_TOL = 1e-6


class AuditFailure(RuntimeError):
    """A solved case failed its feasibility audit; the report is attached."""

    def __init__(self, case: int, report: AuditReport) -> None:
        self.case = case
        self.report = report
        super().__init__(f"case {case} failed audit: {report.verdict_line()}")


@dataclass(frozen=True)
class CaseOutcome:
    case: int
    solution: Solution
    audit_report: AuditReport | None
    summary: PortfolioSummary | None

    @property
    def green_share(self) -> float | None:
        return self.summary.green_share if self.summary else None

    @property
    def net_cost(self) -> float | None:
        return self.summary.net_cost_eur if self.summary else None

    @property
    def solved(self) -> bool:
        return self.solution.status.is_optimal


@dataclass(frozen=True)
class CaseDeltas:
    """Percentage changes against the baseline case (None when base is 0)."""

    net_cost_pct: float | None
    bundled_kg_pct: float | None
    unbundled_kg_pct: float | None
    go_buy_pct: float | None
    go_sell_pct: float | None


@dataclass
class CaseComparison:
    per_case: dict[int, CaseOutcome]
    deltas: dict[int, CaseDeltas]
    baseline_case: int | None

    def all_solved(self) -> bool:
        return all(o.solved for o in self.per_case.values())

    def ordering_ok(self) -> bool:
        """Profit must not decrease from case 1 to 2 to 3 (nested feasible sets)."""
        profits = [(c, o.solution.objective_value)
                   for c, o in sorted(self.per_case.items()) if o.solved]
        for (_, lo), (_, hi) in zip(profits, profits[1:]):
            if hi < lo - ORDERING_TOL * max(1.0, abs(lo)):
                return False
        return True


def proportional_ppa_split(cfg: ScenarioConfig) -> dict[str, PpaSplit]:
    """Split the portfolio PPA profiles across sites by electrolyzer capacity.

    The bundled default for running the per-site setup on scenarios that do
    not prescribe their own site-contract pairing.
    """
    caps = [s.electrolyzer.capacity_mw for s in cfg.sites]
    total = sum(caps)
    weights = [c / total for c in caps] if total > 0 else [1.0 / len(caps)] * len(caps)
    split: dict[str, PpaSplit] = {}
    for site, w in zip(cfg.sites, weights):
        split[site.site_id] = PpaSplit(
            physical=tuple(w * x for x in cfg.contracts.physical_ppa_profile),
            virtual=tuple(w * x for x in cfg.contracts.virtual_ppa_profile),
        )
    return split


def case_config(cfg: ScenarioConfig, case: int) -> CaseConfig:
    """The CaseConfig for standard case 1, 2 or 3 on this scenario.

    Case 1 reuses the scenario's own per-site profiles when present and
    falls back to the proportional split otherwise.
    """
    if case not in CASE_SCOPES:
        raise ValueError(f"case must be 1, 2 or 3, got {case!r}")
    ppa_scope, green_scope = CASE_SCOPES[case]
    split = None
    if case == 1:
        split = cfg.case.per_site_ppa_profiles or proportional_ppa_split(cfg)
    return CaseConfig(ppa_scope, green_scope, split)


def with_case(cfg: ScenarioConfig, case: int) -> ScenarioConfig:
    return replace(cfg, case=case_config(cfg, case))


def run_case(cfg: ScenarioConfig, case: int, opts: SolveOptions | None = None,
             audit_tol: float = 1e-6, backend=None) -> CaseOutcome:
    """Solve one case and audit the result; raises AuditFailure on a bad audit."""
    scenario = with_case(cfg, case)
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioError(violations)
    problem = build_model(scenario)
    solution = solve(problem, opts, backend=backend)
    if not solution.status.is_optimal:
        return CaseOutcome(case, solution, None, None)
    report = audit(scenario, solution, tol=audit_tol)
    if not report.ok:
        raise AuditFailure(case, report)
    return CaseOutcome(case, solution, report, solution.portfolio_summary)


def run_cases(cfg: ScenarioConfig, cases=(1, 2, 3), opts: SolveOptions | None = None,
              audit_tol: float = 1e-6, backend=None) -> CaseComparison:
    """Solve and audit the requested cases, then compute cross-case deltas."""
    outcomes: dict[int, CaseOutcome] = {}
    for case in cases:
        outcomes[case] = run_case(cfg, case, opts, audit_tol, backend)

    solved = [c for c, o in sorted(outcomes.items()) if o.solved]
    baseline = 1 if 1 in solved else (solved[0] if solved else None)
    deltas: dict[int, CaseDeltas] = {}
    if baseline is not None:
        base = outcomes[baseline].summary
        for c in solved:
            if c == baseline:
                continue
            s = outcomes[c].summary
            deltas[c] = CaseDeltas(
                net_cost_pct=_pct(base.net_cost_eur, s.net_cost_eur),
                bundled_kg_pct=_pct(base.bundled_kg, s.bundled_kg),
                unbundled_kg_pct=_pct(base.unbundled_kg, s.unbundled_kg),
                go_buy_pct=_pct(base.go_buy_units, s.go_buy_units),
                go_sell_pct=_pct(base.go_sell_units, s.go_sell_units),
            )
    return CaseComparison(outcomes, deltas, baseline)


def _pct(base: float, value: float) -> float | None:
    if base == 0 or not math.isfinite(base):
        return None
    return 100.0 * (value - base) / abs(base)


# --------------------------------------------------------------------------
# CSV outputs
# --------------------------------------------------------------------------

SUMMARY_COLUMNS = (
    "case", "vppa_mwh", "cfd_eur", "pppa_mwh", "pppa_cost_eur",
    "dam_buy_mwh", "dam_sell_mwh", "dam_net_eur",
    "bundled_kg", "bundled_rev_eur", "unbundled_kg", "unbundled_rev_eur",
    "go_buy_units", "go_sell_units", "go_net_eur", "green_pct", "sum_eur",
)


def summary_rows(comparison: CaseComparison) -> list[dict[str, str]]:
    rows = []
    for case in sorted(comparison.per_case):
        outcome = comparison.per_case[case]
        s = outcome.summary
        if s is None:
            rows.append({"case": str(case),
                         **{c: "NA" for c in SUMMARY_COLUMNS if c != "case"}})
            continue
        green = "NA" if s.green_share is None else f"{100.0 * s.green_share:.4f}"
        rows.append({
            "case": str(case),
            "vppa_mwh": f"{s.vppa_mwh:.4f}",
            "cfd_eur": f"{s.cfd_eur:.4f}",
            "pppa_mwh": f"{s.pppa_mwh:.4f}",
            "pppa_cost_eur": f"{s.pppa_cost_eur:.4f}",
            "dam_buy_mwh": f"{s.dam_buy_mwh:.4f}",
            "dam_sell_mwh": f"{s.dam_sell_mwh:.4f}",
            "dam_net_eur": f"{s.dam_net_eur:.4f}",
            "bundled_kg": f"{s.bundled_kg:.4f}",
            "bundled_rev_eur": f"{s.bundled_rev_eur:.4f}",
            "unbundled_kg": f"{s.unbundled_kg:.4f}",
            "unbundled_rev_eur": f"{s.unbundled_rev_eur:.4f}",
            "go_buy_units": f"{s.go_buy_units:.4f}",
            "go_sell_units": f"{s.go_sell_units:.4f}",
            "go_net_eur": f"{s.go_net_eur:.4f}",
            "green_pct": green,
            "sum_eur": f"{s.net_cost_eur:.4f}",
        })
    return rows


def write_summary_csv(comparison: CaseComparison, path) -> Path:
    """Table-style comparison: one row per case, costs positive, 4 decimals."""
    path = Path(path)
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in summary_rows(comparison):
        lines.append(",".join(row[c] for c in SUMMARY_COLUMNS))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def export_schedules(sol: Solution, out_dir) -> list[Path]:
    """One hourly dispatch CSV per site plus the portfolio aggregate table."""
    if not sol.status.is_optimal:
        raise ValueError(f"cannot export a non-optimal solution ({sol.status.kind.value})")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for sid, frame in sol.per_site_schedule.items():
        path = out / f"site_{sid}.csv"
        frame.to_csv(path, float_format="%.4f")
        written.append(path)
    portfolio = sol.portfolio_schedule
    path = out / "portfolio.csv"
    portfolio.to_csv(path, float_format="%.4f")
    written.append(path)
    return written
