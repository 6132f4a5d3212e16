"""Exact MIP solving behind a minimal backend contract.

The backend contract is a single entry point: take the assembled matrices,
solve, hand back status + objective + variable vector.  The default (and
only bundled) backend drives HiGHS through ``scipy.optimize.milp``; the
``H2PORTFOLIO_BACKEND`` environment variable or the `backend=` argument
select one from the registry.

Solutions expose derived per-site schedule tables and a daily portfolio
summary; both are recomputed from the variable assignment, never read from
solver internals.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .audit import green_share_from_assignment
from .model import (
    PORTFOLIO,
    SITE_HOUR_KINDS,
    CostBreakdown,
    Integrality,
    MilpProblem,
    objective_breakdown,
    var_name,
)

BINARY_TOL = 1e-6  # accepted distance of a "binary" value from {0, 1}

BACKEND_ENV_VAR = "H2PORTFOLIO_BACKEND"


@dataclass
class SolveOptions:
    """Solver knobs. The defaults keep EUR-scale results stable to 5 digits."""

    relative_gap: float = 1e-9
    time_limit_s: float = 60.0
    threads_hint: int = 1

    def __post_init__(self) -> None:
        if self.relative_gap < 0:
            raise ValueError(f"relative_gap must be >= 0, got {self.relative_gap}")
        if self.time_limit_s <= 0:
            raise ValueError(f"time_limit_s must be > 0, got {self.time_limit_s}")


class StatusKind(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    TIME_LIMIT = "time_limit"
    ERROR = "error"


@dataclass(frozen=True)
class SolveStatus:
    kind: StatusKind
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.kind is StatusKind.OPTIMAL


@dataclass(frozen=True)
class PortfolioSummary:
    """Daily portfolio aggregates (quantities and cash flows per market).

    Cash flows follow the cost convention: positive = money spent. The
    bottom line `net_cost_eur` is the negated optimization objective.
    """

    vppa_mwh: float
    cfd_eur: float
    pppa_mwh: float
    pppa_cost_eur: float
    dam_buy_mwh: float
    dam_sell_mwh: float
    dam_net_eur: float
    bundled_kg: float
    bundled_rev_eur: float
    unbundled_kg: float
    unbundled_rev_eur: float
    go_buy_units: float
    go_sell_units: float
    go_net_eur: float
    green_share: float | None
    net_cost_eur: float


@dataclass
class Solution:
    """Solver outcome: status, objective, and the full variable assignment."""

    status: SolveStatus
    objective_value: float | None
    assignment: dict[str, float]
    scenario: object = field(repr=False, default=None)

    @cached_property
    def per_site_schedule(self) -> dict[str, pd.DataFrame]:
        """Hourly dispatch table per site, derived from the assignment."""
        if not self.assignment or self.scenario is None:
            return {}
        cfg = self.scenario
        T = cfg.grid.step_count
        out: dict[str, pd.DataFrame] = {}
        for site in cfg.sites:
            sid = site.site_id
            cols: dict[str, list[float]] = {}
            for kind in _SCHEDULE_KINDS:
                cols[kind] = [self.assignment[var_name(kind, sid, t)] for t in range(T)]
            # State of charge reported at the end of each hour.
            cols["e_EES"] = [self.assignment[var_name("e_EES", sid, t + 1)] for t in range(T)]
            frame = pd.DataFrame(cols, index=pd.RangeIndex(T, name="hour"))
            out[sid] = frame[list(_SCHEDULE_COLUMNS)]
        return out

    @cached_property
    def portfolio_schedule(self) -> pd.DataFrame | None:
        if not self.assignment or self.scenario is None:
            return None
        T = self.scenario.grid.step_count
        cols = {kind: [self.assignment[var_name(kind, PORTFOLIO, t)] for t in range(T)]
                for kind in _PORTFOLIO_COLUMNS}
        return pd.DataFrame(cols, index=pd.RangeIndex(T, name="hour"))

    @cached_property
    def portfolio_summary(self) -> PortfolioSummary | None:
        if not self.assignment or self.scenario is None:
            return None
        return _summarize(self.scenario, self)

    @property
    def breakdown(self) -> CostBreakdown:
        return objective_breakdown(self.scenario, self)


_SCHEDULE_KINDS = tuple(k for k in SITE_HOUR_KINDS)
_SCHEDULE_COLUMNS = (
    "p_Local", "p_PPPA", "p_VPPA", "p_DAM_Buy", "p_DAM_Sell",
    "p_Ch", "p_Dis", "p_EES", "e_EES", "p_EL",
    "h_EL", "h_BD", "h_UBD", "h_DSP",
    "n_GO_VPPA", "n_GO_PPPA", "n_GO_Local", "n_GO_Buy", "n_GO_Sell",
    "n_GO_BD", "n_GO_DSP",
)
_PORTFOLIO_COLUMNS = (
    "P_PPPA_pf", "P_VPPA_pf", "c_CfD", "p_DAM_Buy_pf", "p_DAM_Sell_pf",
    "h_BD_pf", "h_UBD_pf", "n_GO_Buy_pf", "n_GO_Sell_pf",
)


def _summarize(cfg, sol: Solution) -> PortfolioSummary:
    bd = objective_breakdown(cfg, sol)
    a = sol.assignment
    dt = cfg.grid.step_hours
    T = cfg.grid.step_count
    pr = cfg.prices

    def tot(kind: str) -> float:
        return sum(a[var_name(kind, PORTFOLIO, t)] for t in range(T))

    bundled = tot("h_BD_pf")
    unbundled = tot("h_UBD_pf")
    go_buy = tot("n_GO_Buy_pf")
    go_sell = tot("n_GO_Sell_pf")
    return PortfolioSummary(
        vppa_mwh=tot("P_VPPA_pf") * dt,
        cfd_eur=bd.cfd_cost,
        pppa_mwh=tot("P_PPPA_pf") * dt,
        pppa_cost_eur=bd.pppa_cost,
        dam_buy_mwh=tot("p_DAM_Buy_pf") * dt,
        dam_sell_mwh=tot("p_DAM_Sell_pf") * dt,
        dam_net_eur=bd.dam_net_cost,
        bundled_kg=bundled,
        bundled_rev_eur=pr.bundled_h2 * bundled,
        unbundled_kg=unbundled,
        unbundled_rev_eur=pr.unbundled_h2 * unbundled,
        go_buy_units=go_buy,
        go_sell_units=go_sell,
        go_net_eur=bd.go_net_cost,
        green_share=green_share_from_assignment(cfg, a),
        net_cost_eur=bd.net_cost,
    )


# --------------------------------------------------------------------------
# matrix assembly (cached per problem)
# --------------------------------------------------------------------------

@dataclass
class _Matrices:
    names: list[str]
    c: np.ndarray              # objective coefficients, maximize
    A: sparse.csr_matrix
    row_lb: np.ndarray
    row_ub: np.ndarray
    var_lb: np.ndarray
    var_ub: np.ndarray
    integrality: np.ndarray
    binary_idx: np.ndarray
    binary_only_rows: list[tuple[str, tuple[tuple[int, float], ...], str, float]]


def problem_matrices(problem: MilpProblem) -> _Matrices:
    if problem._matrix_cache is not None:
        return problem._matrix_cache

    index = problem.var_index
    n = len(problem.variables)
    m = len(problem.constraints)
    var_lb = np.array([v.lower for v in problem.variables], dtype=float)
    var_ub = np.array([v.upper for v in problem.variables], dtype=float)
    integrality = np.array(
        [1 if v.integrality is Integrality.BINARY else 0 for v in problem.variables],
        dtype=np.uint8)
    binary_mask = integrality == 1

    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    row_lb = np.empty(m)
    row_ub = np.empty(m)
    binary_only: list[tuple[str, tuple[tuple[int, float], ...], str, float]] = []
    for r, con in enumerate(problem.constraints):
        idxs = []
        for name, coeff in con.terms:
            j = index[name]
            rows.append(r)
            cols.append(j)
            data.append(coeff)
            idxs.append((j, coeff))
        if con.relation == "=":
            row_lb[r] = row_ub[r] = con.rhs
        elif con.relation == "<=":
            row_lb[r], row_ub[r] = -np.inf, con.rhs
        elif con.relation == ">=":
            row_lb[r], row_ub[r] = con.rhs, np.inf
        else:
            raise ValueError(f"unknown relation {con.relation!r} in {con.tag}")
        if idxs and all(binary_mask[j] for j, _ in idxs):
            binary_only.append((con.tag, tuple(idxs), con.relation, con.rhs))

    A = sparse.csr_matrix((data, (rows, cols)), shape=(m, n))
    c = np.zeros(n)
    for name, coeff in problem.objective:
        c[index[name]] += coeff

    mats = _Matrices(
        names=[v.name for v in problem.variables],
        c=c, A=A, row_lb=row_lb, row_ub=row_ub,
        var_lb=var_lb, var_ub=var_ub,
        integrality=integrality,
        binary_idx=np.flatnonzero(binary_mask),
        binary_only_rows=binary_only,
    )
    problem._matrix_cache = mats
    return mats


# --------------------------------------------------------------------------
# backends
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RawResult:
    status: StatusKind
    message: str
    x: np.ndarray | None
    objective: float | None


class ScipyHighsBackend:
    """HiGHS via scipy.optimize.milp. Single-threaded and deterministic."""

    name = "scipy-highs"

    def solve_matrices(self, mats: _Matrices, var_lb, var_ub, integrality,
                       opts: SolveOptions) -> RawResult:
        res = milp(
            c=-mats.c,  # scipy minimizes
            constraints=LinearConstraint(mats.A, mats.row_lb, mats.row_ub),
            integrality=integrality,
            bounds=Bounds(var_lb, var_ub),
            options={
                "disp": False,
                "presolve": True,
                "time_limit": opts.time_limit_s,
                "mip_rel_gap": opts.relative_gap,
            },
        )
        kind = {
            0: StatusKind.OPTIMAL,
            1: StatusKind.TIME_LIMIT,
            2: StatusKind.INFEASIBLE,
            3: StatusKind.UNBOUNDED,
        }.get(res.status, StatusKind.ERROR)
        x = np.asarray(res.x) if res.x is not None else None
        if kind is StatusKind.TIME_LIMIT and x is None:
            kind = StatusKind.ERROR
        objective = -float(res.fun) if (x is not None and res.fun is not None) else None
        return RawResult(kind, str(res.message), x, objective)


_BACKENDS = {
    "scipy": ScipyHighsBackend,
    "scipy-highs": ScipyHighsBackend,
    "highs": ScipyHighsBackend,
}


def get_backend(name: str | None = None):
    """Resolve a backend by name, argument first, then the environment."""
    resolved = name or os.environ.get(BACKEND_ENV_VAR, "scipy-highs")
    try:
        return _BACKENDS[resolved.lower()]()
    except KeyError:
        known = ", ".join(sorted(set(_BACKENDS)))
        raise ValueError(f"unknown solver backend {resolved!r} (known: {known})") from None


# --------------------------------------------------------------------------
# entry points
# --------------------------------------------------------------------------

def solve(problem: MilpProblem, opts: SolveOptions | None = None,
          backend=None) -> Solution:
    """Solve the MILP to proven optimality (within opts.relative_gap)."""
    opts = opts or SolveOptions()
    backend = backend or get_backend()
    mats = problem_matrices(problem)
    raw = backend.solve_matrices(mats, mats.var_lb, mats.var_ub, mats.integrality, opts)
    return _to_solution(problem, mats, raw)


def fix_binaries_and_resolve(problem: MilpProblem, pattern: dict[str, int],
                             opts: SolveOptions | None = None,
                             backend=None) -> Solution:
    """LP-solve the continuous restriction with every binary pinned by `pattern`.

    `pattern` must cover every binary variable (by name) with a 0/1 value.
    Rows that involve only binaries are checked directly, so contradictory
    patterns are rejected without a solver call.
    """
    opts = opts or SolveOptions()
    backend = backend or get_backend()
    mats = problem_matrices(problem)

    missing = [n for i in mats.binary_idx if (n := mats.names[i]) not in pattern]
    if missing:
        raise ValueError(f"pattern misses {len(missing)} binaries, first: {missing[0]}")
    for i in mats.binary_idx:
        v = pattern[mats.names[i]]
        if v not in (0, 1):
            raise ValueError(f"pattern value for {mats.names[i]} must be 0 or 1, got {v!r}")

    for tag, terms, relation, rhs in mats.binary_only_rows:
        lhs = sum(coeff * pattern[mats.names[j]] for j, coeff in terms)
        bad = (relation == "=" and abs(lhs - rhs) > 1e-9) \
            or (relation == "<=" and lhs > rhs + 1e-9) \
            or (relation == ">=" and lhs < rhs - 1e-9)
        if bad:
            return Solution(
                SolveStatus(StatusKind.INFEASIBLE, f"pattern violates {tag}"),
                None, {}, problem.scenario)

    var_lb = mats.var_lb.copy()
    var_ub = mats.var_ub.copy()
    for i in mats.binary_idx:
        var_lb[i] = var_ub[i] = float(pattern[mats.names[i]])
    relaxed = np.zeros_like(mats.integrality)
    raw = backend.solve_matrices(mats, var_lb, var_ub, relaxed, opts)
    return _to_solution(problem, mats, raw, check_binaries=False)


def _to_solution(problem: MilpProblem, mats: _Matrices, raw: RawResult,
                 check_binaries: bool = True) -> Solution:
    if raw.x is None:
        return Solution(SolveStatus(raw.status, raw.message), None, {}, problem.scenario)
    if check_binaries and mats.binary_idx.size:
        vals = raw.x[mats.binary_idx]
        dist = np.abs(vals - np.round(vals)).max()
        if dist > BINARY_TOL:
            return Solution(
                SolveStatus(StatusKind.ERROR,
                            f"binary integrality violated by {dist:.2e}"),
                None, {}, problem.scenario)
    assignment = {name: float(val) for name, val in zip(mats.names, raw.x)}
    return Solution(SolveStatus(raw.status, raw.message), raw.objective,
                    assignment, problem.scenario)
