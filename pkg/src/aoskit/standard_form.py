"""Translation to bounded-variable equality standard form.

Target shape: minimize c.x subject to A x = b and per-column bounds
l <= x <= u, where infinite bounds are kept (free variables are not split).
The first ``n_original`` columns are the model's variables in declaration
order, so recovering an original point is a plain prefix slice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LpModel


@dataclass
class StandardForm:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    col_names: tuple[str, ...]
    n_original: int
    sense_sign: int  # +1 the model minimized, -1 it maximized
    obj_constant: float
    row_origin: tuple[int, ...]  # source constraint index per row

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def recover(self, x_std: np.ndarray) -> np.ndarray:
        """Map a standard-form point back to the original variable space."""
        return np.asarray(x_std, dtype=float)[: self.n_original].copy()

    def original_value(self, v_min: float) -> float:
        """Original objective value from the minimized standard value c.x."""
        return self.sense_sign * v_min + self.obj_constant

    def max_violation(self, x_std: np.ndarray) -> float:
        x = np.asarray(x_std, dtype=float)
        resid = np.abs(self.A @ x - self.b) if self.m else np.zeros(0)
        below = self.lower - x
        above = x - self.upper
        parts = [p for p in (resid, below, above) if p.size]
        return float(np.max([p.max() for p in parts])) if parts else 0.0

    def is_feasible(self, x_std: np.ndarray, tol: float = 1e-7) -> bool:
        return self.max_violation(x_std) <= tol


def to_standard_form(model: LpModel) -> StandardForm:
    """Rewrite ``model`` as min c.x, A x = b, l <= x <= u.

    Inequalities gain one slack column each (coefficient +1 for <=, -1 for
    >=, bounds [0, inf)); equalities gain none. Maximization is handled by
    negating the objective and recording ``sense_sign = -1``.
    """
    if model.n_variables == 0:
        raise ValueError("cannot build standard form of a model with no variables")

    n0 = model.n_variables
    rows, rhs, senses = model.constraint_matrix()
    m = rows.shape[0]

    n_slack = sum(1 for s in senses if s != "=")
    A = np.zeros((m, n0 + n_slack))
    A[:, :n0] = rows
    b = rhs.astype(float).copy()

    lower, upper = model.bounds_arrays()
    lower = np.concatenate([lower, np.zeros(n_slack)])
    upper = np.concatenate([upper, np.full(n_slack, np.inf)])

    taken = set(model.variable_names)
    col_names = list(model.variable_names)
    j = n0
    for i, sense in enumerate(senses):
        if sense == "=":
            continue
        A[i, j] = 1.0 if sense == "<=" else -1.0
        name = f"_s[{i}]"
        while name in taken:
            name += "_"
        taken.add(name)
        col_names.append(name)
        j += 1

    sense_sign = 1 if model.objective.sense == "min" else -1
    c = np.zeros(n0 + n_slack)
    c[:n0] = sense_sign * model.objective_vector()

    return StandardForm(
        A=A,
        b=b,
        c=c,
        lower=lower,
        upper=upper,
        col_names=tuple(col_names),
        n_original=n0,
        sense_sign=sense_sign,
        obj_constant=model.objective.constant,
        row_origin=tuple(range(m)),
    )


def drop_redundant_equalities(
    sf: StandardForm, tol: float = 1e-9
) -> tuple[StandardForm, list[int], bool]:
    """Remove equality rows that are linear combinations of earlier rows.

    Rows that carry a slack column are trivially independent, so only pure
    equality rows are tested, via least squares against the rows kept so
    far. Returns (reduced form, dropped row indices, inconsistent flag);
    inconsistent means some dependent row had a conflicting right-hand side,
    which proves infeasibility.
    """
    m = sf.m
    if m == 0:
        return sf, [], False

    has_slack = np.any(sf.A[:, sf.n_original :] != 0.0, axis=1)
    keep: list[int] = []
    dropped: list[int] = []
    inconsistent = False
    eq_kept: list[int] = []
    for i in range(m):
        if has_slack[i]:
            keep.append(i)
            continue
        row = sf.A[i, : sf.n_original]
        scale = max(1.0, float(np.abs(row).max()), abs(float(sf.b[i])))
        if not eq_kept:
            dependent = not np.any(np.abs(row) > tol * scale)
            resid_b = sf.b[i]
        else:
            basis = sf.A[np.array(eq_kept), : sf.n_original]
            lam, *_ = np.linalg.lstsq(basis.T, row, rcond=None)
            resid = row - basis.T @ lam
            dependent = np.abs(resid).max() <= 1e-7 * scale
            resid_b = sf.b[i] - float(sf.b[np.array(eq_kept)] @ lam)
        if dependent:
            dropped.append(i)
            if abs(resid_b) > 1e-7 * scale:
                inconsistent = True
        else:
            keep.append(i)
            eq_kept.append(i)

    if not dropped:
        return sf, [], False

    keep_arr = np.array(sorted(keep), dtype=int)
    # prune slack columns whose only row was dropped
    col_used = np.ones(sf.n, dtype=bool)
    for j in range(sf.n_original, sf.n):
        rows_j = np.nonzero(sf.A[:, j])[0]
        if rows_j.size and all(r in dropped for r in rows_j):
            col_used[j] = False
    reduced = StandardForm(
        A=sf.A[keep_arr][:, col_used].copy(),
        b=sf.b[keep_arr].copy(),
        c=sf.c[col_used].copy(),
        lower=sf.lower[col_used].copy(),
        upper=sf.upper[col_used].copy(),
        col_names=tuple(n for n, u in zip(sf.col_names, col_used) if u),
        n_original=sf.n_original,
        sense_sign=sf.sense_sign,
        obj_constant=sf.obj_constant,
        row_origin=tuple(sf.row_origin[i] for i in keep_arr),
    )
    return reduced, dropped, inconsistent
