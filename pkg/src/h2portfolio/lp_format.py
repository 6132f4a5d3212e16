"""CPLEX-style LP text export of a built model.

Lets a model be cross-checked against external solvers and diff-friendly
tooling. Constraint tags become LP row names (sanitized to the character
set LP files allow); variable names are sanitized the same way, with a
deterministic suffix on collisions.
"""
from __future__ import annotations

import re
from pathlib import Path

from .model import Integrality, MilpProblem

_SANITIZE = re.compile(r"[^A-Za-z0-9_]+")


def lp_string(problem: MilpProblem) -> str:
    var_names = _name_map(v.name for v in problem.variables)
    row_names = _name_map(c.tag for c in problem.constraints)

    lines: list[str] = ["\\ h2portfolio day-ahead portfolio scheduling model", "Maximize"]
    lines.append(" obj: " + _expr(problem.objective, var_names))

    lines.append("Subject To")
    for con in problem.constraints:
        rel = {"<=": "<=", ">=": ">=", "=": "="}[con.relation]
        lines.append(f" {row_names[con.tag]}: {_expr(con.terms, var_names)} {rel} {_fmt(con.rhs)}")

    lines.append("Bounds")
    for v in problem.variables:
        if v.integrality is Integrality.BINARY:
            continue
        name = var_names[v.name]
        lo = "-inf" if v.lower == float("-inf") else _fmt(v.lower)
        hi = "+inf" if v.upper == float("inf") else _fmt(v.upper)
        if lo == "-inf" and hi == "+inf":
            lines.append(f" {name} free")
        elif v.lower == 0.0 and hi == "+inf":
            continue  # LP default
        else:
            lines.append(f" {lo} <= {name} <= {hi}")

    binaries = [var_names[v.name] for v in problem.variables
                if v.integrality is Integrality.BINARY]
    if binaries:
        lines.append("Binary")
        lines.extend(f" {name}" for name in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp(problem: MilpProblem, path) -> Path:
    path = Path(path)
    path.write_text(lp_string(problem), encoding="utf-8")
    return path


def _expr(terms, names: dict[str, str]) -> str:
    if not terms:
        return "0 ONE_DUMMY"
    parts: list[str] = []
    for i, (name, coeff) in enumerate(terms):
        sign = "-" if coeff < 0 else ("+" if i else "")
        mag = _fmt(abs(coeff))
        parts.append(f"{sign} {mag} {names[name]}" if sign else f"{mag} {names[name]}")
    return " ".join(parts)


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _name_map(names) -> dict[str, str]:
    out: dict[str, str] = {}
    used: set[str] = set()
    for name in names:
        base = _SANITIZE.sub("_", name).strip("_")
        if not base or base[0].isdigit():
            base = "x_" + base
        candidate = base
        k = 2
        while candidate in used:
            candidate = f"{base}_{k}"
            k += 1
        used.add(candidate)
        out[name] = candidate
    return out
