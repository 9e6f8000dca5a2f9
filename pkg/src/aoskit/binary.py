"""Branch-and-bound for binary programs and no-good-cut solution pools."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .model import Constraint, LpModel
from .simplex import INFEASIBLE, NUMERIC_FAILURE, OPTIMAL, SimplexResult, solve_model
from .sublevel import SublevelSpec

INT_TOL = 1e-6
VALUE_TOL = 1e-9


def _checked_binary_names(model: LpModel, binary_vars) -> tuple[str, ...]:
    """Binary variable names in model declaration order, bounds validated."""
    requested = set(binary_vars)
    unknown = requested - set(model.variable_names)
    if unknown:
        raise ValueError(f"binary variables not in the model: {sorted(unknown)}")
    names = tuple(n for n in model.variable_names if n in requested)
    for n in names:
        v = model.variables[model.variable_index(n)]
        if v.lower < -INT_TOL or v.upper > 1 + INT_TOL:
            raise ValueError(
                f"binary variable {n!r} must have bounds within [0,1], got [{v.lower}, {v.upper}]"
            )
    return names


def _fix_variables(model: LpModel, fixes: dict[str, int]) -> LpModel:
    new_vars = []
    for v in model.variables:
        if v.name in fixes:
            val = float(fixes[v.name])
            v = dataclasses.replace(v, lower=val, upper=val)
        new_vars.append(v)
    return LpModel(new_vars, model.constraints, model.objective, metadata=model.metadata)


def solve_binary(model: LpModel, binary_vars) -> SimplexResult:
    """Optimal point with the named variables restricted to {0, 1}.

    Depth-first branch and bound over the LP relaxation: branch on the
    lowest-index fractional binary, explore the 0-branch first, prune on
    bound; the first incumbent wins objective ties.
    """
    names = _checked_binary_names(model, binary_vars)
    sense = model.objective.sense
    idx = [model.variable_index(n) for n in names]

    best: SimplexResult | None = None

    def worse_or_equal(value: float) -> bool:
        """True when a relaxation bound cannot strictly beat the incumbent."""
        assert best is not None
        if sense == "min":
            return value >= best.value - VALUE_TOL
        return value <= best.value + VALUE_TOL

    stack: list[dict[str, int]] = [{}]
    relaxations_solved = 0
    while stack:
        fixes = stack.pop()
        res = solve_model(_fix_variables(model, fixes))
        relaxations_solved += 1
        if res.status == NUMERIC_FAILURE:
            return res
        if res.status != OPTIMAL:
            continue
        if best is not None and worse_or_equal(res.value):
            continue
        frac = next(
            (pos for pos, j in enumerate(idx) if abs(res.x[j] - round(res.x[j])) > INT_TOL),
            None,
        )
        if frac is None:
            # integral relaxation: re-solve with binaries pinned for a clean completion
            snapped = dict(fixes)
            for pos, j in enumerate(idx):
                snapped[names[pos]] = int(round(res.x[j]))
            clean = solve_model(_fix_variables(model, snapped))
            if clean.status == OPTIMAL and (best is None or not worse_or_equal(clean.value)):
                best = clean
            continue
        # LIFO: push the 1-branch first so the 0-branch is explored first
        stack.append({**fixes, names[frac]: 1})
        stack.append({**fixes, names[frac]: 0})

    if best is None:
        return SimplexResult(status=INFEASIBLE, message="no binary assignment is feasible")
    best.message = f"branch-and-bound over {relaxations_solved} LP relaxations"
    return best


@dataclass
class BinarySolutionPool:
    """Alternative binary solutions within the level value, best first.

    ``exhausted`` is the completeness claim: True means no further feasible
    binary assignment with objective within ``tau`` exists.
    """

    names: tuple[str, ...]
    assignments: list[tuple[int, ...]]
    values: list[float]
    tau: float | None
    exhausted: bool

    def __len__(self) -> int:
        return len(self.assignments)

    def __contains__(self, assignment) -> bool:
        return tuple(int(v) for v in assignment) in set(self.assignments)

    def to_json_dict(self) -> dict:
        return {
            "binary_names": list(self.names),
            "count": len(self),
            "tau": self.tau,
            "exhausted": self.exhausted,
            "entries": [
                {"assignment": list(a), "value": v}
                for a, v in zip(self.assignments, self.values)
            ],
        }


def no_good_cut(names: tuple[str, ...], assignment: tuple[int, ...]) -> Constraint:
    """Constraint excluding exactly this 0/1 assignment of the named variables.

    Flipping any one coordinate satisfies it, so feasible points at Hamming
    distance >= 1 all survive.
    """
    coeffs = {n: (-1.0 if a == 1 else 1.0) for n, a in zip(names, assignment)}
    return Constraint(coeffs=coeffs, sense=">=", rhs=1.0 - float(sum(assignment)))


def enumerate_binary(
    model: LpModel, binary_vars, spec: SublevelSpec, limit: int = 1000
) -> BinarySolutionPool:
    """All binary-feasible assignments within the sublevel of ``spec``.

    Iterates solve / record / add a no-good cut until the next optimum
    exceeds the level value, infeasibility proves exhaustion, or ``limit``
    entries accumulate. Entries are sorted best objective first, ties by
    assignment lexicographically.
    """
    if limit < 1:
        raise ValueError(f"limit must be at least 1, got {limit}")
    names = _checked_binary_names(model, binary_vars)
    idx = [model.variable_index(n) for n in names]
    sense = model.objective.sense

    first = solve_binary(model, names)
    if first.status == NUMERIC_FAILURE:
        raise ArithmeticError(f"binary solve failed: {first.message}")
    if first.status != OPTIMAL:
        return BinarySolutionPool(names, [], [], tau=None, exhausted=True)
    tau = spec.resolve(first.value, sense)

    current = model
    assignments: list[tuple[int, ...]] = []
    values: list[float] = []
    exhausted = False
    res = first
    while True:
        if (sense == "min" and res.value > tau + VALUE_TOL) or (
            sense == "max" and res.value < tau - VALUE_TOL
        ):
            exhausted = True  # every uncut assignment is at least this bad
            break
        assignment = tuple(int(round(res.x[j])) for j in idx)
        assignments.append(assignment)
        values.append(res.value)
        if len(assignments) >= limit:
            break
        current = current.with_constraint(no_good_cut(names, assignment))
        res = solve_binary(current, names)
        if res.status == NUMERIC_FAILURE:
            raise ArithmeticError(f"binary solve failed: {res.message}")
        if res.status != OPTIMAL:
            exhausted = True
            break

    sign = 1.0 if sense == "min" else -1.0
    order = sorted(range(len(assignments)), key=lambda i: (sign * values[i], assignments[i]))
    return BinarySolutionPool(
        names=names,
        assignments=[assignments[i] for i in order],
        values=[values[i] for i in order],
        tau=tau,
        exhausted=exhausted,
    )
