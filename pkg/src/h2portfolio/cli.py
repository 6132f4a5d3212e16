"""Command line front end.

    h2portfolio solve   --scenario F --case N --out D [--gap G] [--time-limit S]
    h2portfolio compare --scenario F --out D [--gap G] [--time-limit S]
    h2portfolio audit   --scenario F --solution F [--tol T]
    h2portfolio ingest  --raw D --out F

Exit codes: 0 success (solved, audited, invariants hold), 2 infeasible,
3 audit failure, 4 invalid input, 1 any other solver or invariant problem.
The solver backend is picked via the H2PORTFOLIO_BACKEND environment
variable (default: the bundled scipy/HiGHS adapter).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path

from .audit import audit
from .domain import ScenarioConfig, validate_scenario
from .ingest import ingest_raw
from .model import ScenarioError, build_model
from .runner import (
    AuditFailure,
    CaseComparison,
    CaseOutcome,
    run_cases,
    export_schedules,
    with_case,
    write_summary_csv,
)
from .scenario_io import ScenarioFormatError, load_scenario, save_scenario
from .solver import Solution, SolveOptions, SolveStatus, StatusKind, get_backend

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INFEASIBLE = 2
EXIT_AUDIT = 3
EXIT_INPUT = 4


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ScenarioFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ScenarioError as exc:
        for violation in exc.violations:
            print(f"input error: {violation}", file=sys.stderr)
        return EXIT_INPUT
    except AuditFailure as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return EXIT_AUDIT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="h2portfolio",
        description="Day-ahead scheduling of a hydrogen production portfolio "
                    "across electricity, hydrogen, and certificate markets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p):
        p.add_argument("--gap", type=float, default=1e-9,
                       help="relative MIP gap (default 1e-9)")
        p.add_argument("--time-limit", type=float, default=60.0,
                       help="solver time limit in seconds (default 60)")

    p = sub.add_parser("solve", help="solve one case and write its outputs")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--case", required=True, type=int, choices=(1, 2, 3))
    p.add_argument("--out", required=True, type=Path)
    add_solver_flags(p)
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("compare", help="run cases 1-3 and write the comparison table")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    add_solver_flags(p)
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("audit", help="re-check a stored solution against a scenario")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--solution", required=True, type=Path)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(handler=_cmd_audit)

    p = sub.add_parser("ingest", help="convert a raw data directory into a scenario file")
    p.add_argument("--raw", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(handler=_cmd_ingest)
    return parser


def _load_valid_scenario(path: Path) -> ScenarioConfig:
    cfg = load_scenario(path)
    violations = validate_scenario(cfg)
    if violations:
        raise ScenarioError(violations)
    return cfg


def _cmd_solve(args) -> int:
    cfg = _load_valid_scenario(args.scenario)
    opts = SolveOptions(relative_gap=args.gap, time_limit_s=args.time_limit)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write_manifest(out, args.scenario, [args.case], opts)

    scenario = with_case(cfg, args.case)
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioError(violations)
    solution = _solve_only(scenario, opts)
    _write_solution(out / "solution.json", solution)
    if solution.status.kind is StatusKind.INFEASIBLE:
        print(f"case {args.case}: infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not solution.status.is_optimal:
        print(f"case {args.case}: {solution.status.kind.value} "
              f"({solution.status.message})", file=sys.stderr)
        return EXIT_FAILURE

    report = audit(scenario, solution)
    report.to_csv(out / "audit.csv")
    print(report.verdict_line())
    if not report.ok:
        return EXIT_AUDIT

    export_schedules(solution, out / "schedules")
    outcome = CaseOutcome(args.case, solution, report, solution.portfolio_summary)
    write_summary_csv(CaseComparison({args.case: outcome}, {}, args.case), out / "summary.csv")
    print(f"case {args.case}: optimal, objective {solution.objective_value:.4f} EUR "
          f"(net cost {solution.portfolio_summary.net_cost_eur:.4f} EUR)")
    return EXIT_OK


def _solve_only(scenario: ScenarioConfig, opts: SolveOptions) -> Solution:
    from .solver import solve

    return solve(build_model(scenario), opts)


def _cmd_compare(args) -> int:
    cfg = _load_valid_scenario(args.scenario)
    opts = SolveOptions(relative_gap=args.gap, time_limit_s=args.time_limit)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write_manifest(out, args.scenario, [1, 2, 3], opts)

    try:
        comparison = run_cases(cfg, (1, 2, 3), opts)
    except AuditFailure as exc:
        exc.report.to_csv(out / f"audit_case{exc.case}.csv")
        raise

    write_summary_csv(comparison, out / "summary.csv")
    for case, outcome in sorted(comparison.per_case.items()):
        if outcome.audit_report is not None:
            outcome.audit_report.to_csv(out / f"audit_case{case}.csv")
        if outcome.solved:
            export_schedules(outcome.solution, out / f"schedules_case{case}")
            print(f"case {case}: optimal, net cost "
                  f"{outcome.summary.net_cost_eur:.4f} EUR, "
                  f"green {100 * (outcome.green_share or 0):.2f}%")
        else:
            print(f"case {case}: {outcome.solution.status.kind.value}", file=sys.stderr)

    if not comparison.all_solved():
        kinds = {o.solution.status.kind for o in comparison.per_case.values()}
        return EXIT_INFEASIBLE if StatusKind.INFEASIBLE in kinds else EXIT_FAILURE
    if not comparison.ordering_ok():
        print("case ordering violated: net cost should not increase from case 1 to 3",
              file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_audit(args) -> int:
    cfg = _load_valid_scenario(args.scenario)
    solution = _read_solution(args.solution)
    report = audit(cfg, solution, tol=args.tol)
    print(report.verdict_line())
    return EXIT_OK if report.ok else EXIT_AUDIT


def _cmd_ingest(args) -> int:
    cfg = ingest_raw(args.raw)
    violations = validate_scenario(cfg)
    if violations:
        raise ScenarioError(violations)
    save_scenario(cfg, args.out)
    print(f"wrote {args.out} ({len(cfg.sites)} sites, {cfg.grid.step_count} hours)")
    return EXIT_OK


def _write_solution(path: Path, solution: Solution) -> None:
    doc = {
        "status": solution.status.kind.value,
        "message": solution.status.message,
        "objective_value": solution.objective_value,
        "assignment": solution.assignment,
    }
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def _read_solution(path: Path) -> Solution:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioFormatError(str(path), f"cannot read solution file ({exc})") from exc
    try:
        kind = StatusKind(doc["status"])
        assignment = {str(k): float(v) for k, v in doc["assignment"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioFormatError(str(path), f"malformed solution file ({exc})") from exc
    objective = doc.get("objective_value")
    return Solution(SolveStatus(kind, doc.get("message", "")),
                    None if objective is None else float(objective),
                    assignment)


def _write_manifest(out: Path, scenario_path: Path, cases, opts: SolveOptions) -> None:
    try:
        version = metadata.version("h2portfolio")
    except metadata.PackageNotFoundError:
        version = "unknown"
    digest = hashlib.sha256(Path(scenario_path).read_bytes()).hexdigest()
    manifest = {
        "tool": "h2portfolio",
        "tool_version": version,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "scenario_path": str(scenario_path),
        "scenario_sha256": digest,
        "cases": list(cases),
        "options": {
            "relative_gap": opts.relative_gap,
            "time_limit_s": opts.time_limit_s,
            "threads_hint": opts.threads_hint,
        },
        "backend": type(get_backend()).__name__,
        "output_dir": str(out),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")


if __name__ == "__main__":
    sys.exit(main())
