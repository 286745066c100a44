"""Problem files: a degree, constraints and run options in one JSON document.

Entries of constraint bases and directions may be parameter names (or a
name with a leading minus sign) that are substituted from the document's
``parameters`` table, so one file can describe a whole family of instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from tropicount.combinatorics import Degree
from tropicount.constraints import AffineConstraint, InvalidConstraints


@dataclass
class ProblemSpec:
    degree: Degree
    constraints: list[AffineConstraint]
    options: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)


def _subst(x, params: dict):
    if isinstance(x, str):
        name = x.strip()
        sign = 1
        if name.startswith("-") and name[1:] in params:
            sign, name = -1, name[1:]
        if name in params:
            return sign * params[name]
    return x


def parse_problem(data: dict, overrides: dict | None = None) -> ProblemSpec:
    params = dict(data.get("parameters", {}))
    params.update(overrides or {})
    degree = Degree.from_json(data["degree"])
    cons = []
    for c in data["constraints"]:
        try:
            base = [_subst(x, params) for x in c["base"]]
            dirs = [[int(_subst(x, params)) for x in v] for v in c.get("directions", [])]
        except (TypeError, ValueError) as exc:
            raise InvalidConstraints("Parse", f"cannot read constraint {c}: {exc}") from exc
        cons.append(AffineConstraint.from_json({"base": base, "directions": dirs}))
    return ProblemSpec(degree, cons, dict(data.get("options", {})), params)


def load_problem(path: str | Path, overrides: dict | None = None) -> ProblemSpec:
    with open(path) as fh:
        return parse_problem(json.load(fh), overrides)
