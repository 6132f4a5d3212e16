"""Exhaustive reference optimizer for tiny instances.

Enumerates every assignment of the switching binaries, LP-solves the
continuous restriction for each via
:func:`~h2portfolio.solver.fix_binaries_and_resolve`, and keeps the best.
No bounding, no heuristics; the only shortcut is fixing binaries whose
gated quantity has a zero bound (both settings are then equivalent), which
halves the search space per degenerate binary without losing exactness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .domain import ScenarioConfig
from .model import MilpProblem, build_model
from .solver import SolveOptions, StatusKind, fix_binaries_and_resolve

MAX_BINARIES = 24


@dataclass(frozen=True)
class OracleResult:
    objective: float | None          # None when every pattern is infeasible
    best_pattern: dict[str, int] | None
    patterns_tried: int              # 2 ** (non-degenerate binary count)
    infeasible_patterns: int

    @property
    def feasible(self) -> bool:
        return self.objective is not None


def oracle_solve(cfg: ScenarioConfig, opts: SolveOptions | None = None) -> OracleResult:
    """Globally optimize `cfg` by full binary enumeration.

    Refuses instances with more than 24 binaries (6 per site-hour), since
    the pattern count doubles with each one.
    """
    problem = build_model(cfg)
    return oracle_solve_problem(problem, opts)


def oracle_solve_problem(problem: MilpProblem, opts: SolveOptions | None = None) -> OracleResult:
    opts = opts or SolveOptions()
    binaries = [v.name for v in problem.binaries()]
    if len(binaries) > MAX_BINARIES:
        raise ValueError(
            f"instance has {len(binaries)} binaries; the oracle enumerates at most "
            f"{MAX_BINARIES} (2 sites x 2 hours)")

    degenerate = _zero_gated_binaries(problem)
    free = [name for name in binaries if name not in degenerate]

    best_obj: float | None = None
    best_pattern: dict[str, int] | None = None
    infeasible = 0
    tried = 0
    for bits in itertools.product((0, 1), repeat=len(free)):
        tried += 1
        pattern = dict.fromkeys(degenerate, 0)
        pattern.update(zip(free, bits))
        sol = fix_binaries_and_resolve(problem, pattern, opts)
        if sol.status.kind is not StatusKind.OPTIMAL:
            infeasible += 1
            continue
        if best_obj is None or sol.objective_value > best_obj:
            best_obj = sol.objective_value
            best_pattern = pattern
    return OracleResult(best_obj, best_pattern, tried, infeasible)


def _zero_gated_binaries(problem: MilpProblem) -> set[str]:
    """Binaries whose gating row bounds the gated variable by zero.

    Gating rows look like  x - bound * i <= 0  with x continuous and i
    binary; when bound == 0 the row forces x = 0 either way, so pinning
    i = 0 cannot cut the optimum (it only loosens exclusivity rows).
    """
    binary_names = {v.name for v in problem.binaries()}
    zero_gated: set[str] = set()
    for con in problem.constraints:
        if con.relation != "<=" or con.rhs != 0.0 or len(con.terms) != 2:
            continue
        (name_a, coeff_a), (name_b, coeff_b) = con.terms
        if name_b in binary_names and name_a not in binary_names:
            if coeff_a > 0 and coeff_b == 0.0:
                zero_gated.add(name_b)
    return zero_gated
