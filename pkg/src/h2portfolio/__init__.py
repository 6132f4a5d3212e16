"""Day-ahead portfolio scheduling for hydrogen producers.

Builds and solves a mixed-integer linear program that co-optimizes
electrolyzers, renewables, batteries, PPAs, and participation in the
electricity, hydrogen (bundled/unbundled), and green-certificate markets
under per-site or portfolio-wide compliance scoping, with an independent
feasibility auditor and an exhaustive enumeration oracle for verification.
"""
from .audit import AuditEntry, AuditReport, audit, green_share
from .domain import (
    CASE_SCOPES,
    CaseConfig,
    ContractTerms,
    ElectrolyzerSpec,
    MarketPrices,
    PolicyConfig,
    PpaSplit,
    RenewableSpec,
    ScenarioConfig,
    Scope,
    SiteSpec,
    StorageSpec,
    TimeGrid,
    Violation,
    dsp_demand,
    validate_scenario,
)
from .lp_format import lp_string, write_lp
from .model import (
    Constraint,
    CostBreakdown,
    Integrality,
    MilpProblem,
    ScenarioError,
    VariableRef,
    build_model,
    build_unscoped_model,
    objective_breakdown,
    scope_constraints,
)
from .oracle import OracleResult, oracle_solve
from .runner import (
    AuditFailure,
    CaseComparison,
    CaseOutcome,
    export_schedules,
    proportional_ppa_split,
    run_case,
    run_cases,
    with_case,
    write_summary_csv,
)
from .scenario_io import ScenarioFormatError, load_scenario, save_scenario
from .solver import (
    PortfolioSummary,
    Solution,
    SolveOptions,
    SolveStatus,
    StatusKind,
    fix_binaries_and_resolve,
    get_backend,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AuditEntry", "AuditFailure", "AuditReport", "CASE_SCOPES", "CaseComparison",
    "CaseConfig", "CaseOutcome", "Constraint", "ContractTerms", "CostBreakdown",
    "ElectrolyzerSpec", "Integrality", "MarketPrices", "MilpProblem", "OracleResult",
    "PolicyConfig", "PortfolioSummary", "PpaSplit", "RenewableSpec", "ScenarioConfig",
    "ScenarioError", "ScenarioFormatError", "Scope", "SiteSpec", "Solution",
    "SolveOptions", "SolveStatus", "StatusKind", "StorageSpec", "TimeGrid",
    "VariableRef", "Violation",
    "audit", "build_model", "build_unscoped_model", "dsp_demand", "export_schedules",
    "fix_binaries_and_resolve", "get_backend", "green_share", "load_scenario",
    "lp_string", "objective_breakdown", "oracle_solve", "proportional_ppa_split",
    "run_case", "run_cases", "save_scenario", "scope_constraints", "solve",
    "validate_scenario", "with_case", "write_lp", "write_summary_csv",
]
