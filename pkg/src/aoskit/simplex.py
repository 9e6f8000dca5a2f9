"""Two-phase revised simplex for bounded-variable standard form.

Handles general bounds (including free and fixed columns) without variable
splitting: a nonbasic column rests at its lower bound, its upper bound, or,
when both bounds are infinite, at zero. Phase 1 minimizes the total
artificial infeasibility; phase 2 minimizes the real objective. Dantzig
pricing with a permanent switch to Bland's rule after a long degenerate
stall keeps the method finite.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import LpModel
from .standard_form import StandardForm, drop_redundant_equalities, to_standard_form

TOL_PIVOT = 1e-9
TOL_FEAS = 1e-7
TOL_DUAL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERIC_FAILURE = "numeric_failure"


@dataclass
class SimplexResult:
    """Solver outcome; basis and statuses describe the final vertex."""

    status: str
    x: np.ndarray | None = None
    value: float | None = None
    x_std: np.ndarray | None = None
    value_std: float | None = None
    basis: tuple[int, ...] = ()
    statuses: tuple[str, ...] = ()
    sf: StandardForm | None = None
    ray: np.ndarray | None = None
    iterations: int = 0
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


class _BoundedSimplex:
    """Mutable solver state over one standard form, artificials appended."""

    def __init__(self, sf: StandardForm, max_iter: int | None = None):
        self.sf = sf
        m, n = sf.m, sf.n
        self.n_real = n
        self.A = np.hstack([sf.A, np.zeros((m, m))])
        self.b = sf.b.copy()
        self.lower = np.concatenate([sf.lower, np.zeros(m)])
        self.upper = np.concatenate([sf.upper, np.full(m, np.inf)])
        self.row_keep = list(range(m))
        self.basis: list[int] = []
        self.status = np.full(n + m, "L", dtype="<U1")
        self.iterations = 0
        self.max_iter = max_iter if max_iter is not None else max(5000, 200 * (m + n))
        self.bland = False
        self.degenerate_run = 0

    # -- linear algebra helpers -------------------------------------------

    def _B(self) -> np.ndarray:
        return self.A[:, self.basis] if self.basis else np.zeros((0, 0))

    def _nonbasic_value(self, j: int) -> float:
        s = self.status[j]
        if s == "L":
            return self.lower[j]
        if s == "U":
            return self.upper[j]
        return 0.0  # free, resting at zero

    def compute_x(self) -> np.ndarray:
        x = np.zeros(self.A.shape[1])
        basic = np.zeros(self.A.shape[1], dtype=bool)
        basic[self.basis] = True
        for j in np.nonzero(~basic)[0]:
            x[j] = self._nonbasic_value(j)
        if self.basis:
            rhs = self.b - self.A[:, ~basic] @ x[~basic]
            x[self.basis] = np.linalg.solve(self._B(), rhs)
        return x

    # -- pivoting -----------------------------------------------------------

    def _entering(self, d: np.ndarray) -> int | None:
        n_tot = self.A.shape[1]
        cand = np.zeros(n_tot, dtype=bool)
        st = self.status
        movable = (st != "B") & (self.lower != self.upper)
        cand |= movable & (st == "L") & (d < -TOL_DUAL)
        cand |= movable & (st == "U") & (d > TOL_DUAL)
        cand |= movable & (st == "F") & (np.abs(d) > TOL_DUAL)
        idx = np.nonzero(cand)[0]
        if idx.size == 0:
            return None
        if self.bland:
            return int(idx[0])
        return int(idx[np.argmax(np.abs(d[idx]))])

    def _step(self, c: np.ndarray, x: np.ndarray) -> str | None:
        """One pivot or bound flip; returns a terminal status or None."""
        try:
            if self.basis:
                y = np.linalg.solve(self._B().T, c[self.basis])
                d = c - self.A.T @ y
            else:
                d = c.copy()
        except np.linalg.LinAlgError:
            return NUMERIC_FAILURE
        d[self.basis] = 0.0

        j = self._entering(d)
        if j is None:
            return OPTIMAL
        direction = 1.0 if (self.status[j] == "L" or d[j] < 0) else -1.0

        try:
            w = np.linalg.solve(self._B(), self.A[:, j]) if self.basis else np.zeros(0)
        except np.linalg.LinAlgError:
            return NUMERIC_FAILURE

        # rate of change of each basic variable as x_j moves by +t*direction
        rate = -direction * w
        xb = x[self.basis] if self.basis else np.zeros(0)
        ratios = np.full(len(self.basis), np.inf)
        for i, bi in enumerate(self.basis):
            if rate[i] > TOL_PIVOT and np.isfinite(self.upper[bi]):
                ratios[i] = (self.upper[bi] - xb[i]) / rate[i]
            elif rate[i] < -TOL_PIVOT and np.isfinite(self.lower[bi]):
                ratios[i] = (xb[i] - self.lower[bi]) / (-rate[i])
        ratios = np.maximum(ratios, 0.0)  # degenerate overshoot clamps to zero

        own_range = self.upper[j] - self.lower[j]
        t_basic = float(ratios.min()) if ratios.size else np.inf
        if own_range <= t_basic:
            if not np.isfinite(own_range):
                return UNBOUNDED
            # bound flip: the entering column crosses to its other bound
            self.status[j] = "U" if self.status[j] == "L" else "L"
            self.degenerate_run = self.degenerate_run + 1 if own_range <= TOL_PIVOT else 0
            return None
        if not np.isfinite(t_basic):
            return UNBOUNDED

        tied = np.nonzero(ratios <= t_basic * (1 + 1e-9) + 1e-12)[0]
        if self.bland:
            r = int(tied[np.argmin(np.array(self.basis)[tied])])
        else:
            r = int(tied[np.argmax(np.abs(w[tied]))])
        leaving = self.basis[r]
        self.status[leaving] = "U" if rate[r] > 0 else "L"
        self.status[j] = "B"
        self.basis[r] = j

        self.degenerate_run = self.degenerate_run + 1 if t_basic <= TOL_PIVOT else 0
        return None

    def run(self, c: np.ndarray) -> tuple[str, np.ndarray | None]:
        """Iterate to optimality for objective c; returns (status, entering ray)."""
        stall_limit = 50 * max(1, len(self.basis))
        while True:
            if self.iterations >= self.max_iter:
                return NUMERIC_FAILURE, None
            self.iterations += 1
            if self.degenerate_run > stall_limit:
                self.bland = True
            x = self.compute_x()
            outcome = self._step(c, x)
            if outcome == UNBOUNDED:
                return UNBOUNDED, self._last_ray(c, x)
            if outcome is not None:
                return outcome, None

    def _last_ray(self, c: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Recession direction for the step that just proved unboundedness."""
        if self.basis:
            y = np.linalg.solve(self._B().T, c[self.basis])
            d = c - self.A.T @ y
        else:
            d = c.copy()
        d[self.basis] = 0.0
        j = self._entering(d)
        direction = 1.0 if (self.status[j] == "L" or d[j] < 0) else -1.0
        ray = np.zeros(self.A.shape[1])
        ray[j] = direction
        if self.basis:
            w = np.linalg.solve(self._B(), self.A[:, j])
            ray[self.basis] = -direction * w
        return ray

    # -- phase 1 -------------------------------------------------------------

    def phase1(self) -> str:
        m, n = len(self.b), self.n_real
        for j in range(n):
            if np.isfinite(self.lower[j]):
                self.status[j] = "L"
            elif np.isfinite(self.upper[j]):
                self.status[j] = "U"
            else:
                self.status[j] = "F"
        x_fixed = np.array([self._nonbasic_value(j) for j in range(n)])
        resid = self.b - self.A[:, :n] @ x_fixed
        for i in range(m):
            self.A[i, n + i] = 1.0 if resid[i] >= 0 else -1.0
        self.basis = list(range(n, n + m))
        self.status[n:] = "B"

        c1 = np.zeros(n + m)
        c1[n:] = 1.0
        status, _ = self.run(c1)
        if status != OPTIMAL:
            return status
        x = self.compute_x()
        if x[n:].sum() > TOL_FEAS * max(1.0, float(np.abs(self.b).max(initial=0.0))):
            return INFEASIBLE
        self._expel_artificials()
        # artificials are now pinned at zero and can never re-enter
        self.lower[self.n_real :] = 0.0
        self.upper[self.n_real :] = 0.0
        return OPTIMAL

    def _expel_artificials(self):
        """Pivot residual artificials out of the basis, dropping truly null rows."""
        for r in range(len(self.basis) - 1, -1, -1):
            if self.basis[r] < self.n_real:
                continue
            e_r = np.zeros(len(self.basis))
            e_r[r] = 1.0
            w_row = np.linalg.solve(self._B().T, e_r)
            vals = w_row @ self.A[:, : self.n_real]
            vals[[bj for bj in self.basis if bj < self.n_real]] = 0.0
            k = int(np.argmax(np.abs(vals)))
            if abs(vals[k]) > TOL_PIVOT:
                art = self.basis[r]
                self.basis[r] = k
                self.status[k] = "B"
                self.status[art] = "L"
            else:
                self._drop_row(r)

    def _drop_row(self, r: int):
        art = self.basis[r]
        keep = [i for i in range(len(self.b)) if i != r]
        self.A = self.A[keep]
        self.b = self.b[keep]
        del self.row_keep[r]
        del self.basis[r]
        self.status[art] = "L"
        self.upper[art] = 0.0


def solve_standard(sf: StandardForm, max_iter: int | None = None) -> SimplexResult:
    """Solve a standard form to optimality; see :class:`SimplexResult`."""
    solver = _BoundedSimplex(sf, max_iter=max_iter)
    try:
        status = solver.phase1()
        ray_std = None
        if status == OPTIMAL:
            c2 = np.zeros(solver.A.shape[1])
            c2[: sf.n] = sf.c
            status, ray_std = solver.run(c2)
    except np.linalg.LinAlgError:
        status = NUMERIC_FAILURE

    kept = solver.row_keep
    used_sf = sf
    if len(kept) != sf.m:
        used_sf = StandardForm(
            A=sf.A[kept].copy(),
            b=sf.b[kept].copy(),
            c=sf.c,
            lower=sf.lower,
            upper=sf.upper,
            col_names=sf.col_names,
            n_original=sf.n_original,
            sense_sign=sf.sense_sign,
            obj_constant=sf.obj_constant,
            row_origin=tuple(sf.row_origin[i] for i in kept),
        )

    if status == OPTIMAL:
        x_full = solver.compute_x()
        x_std = x_full[: sf.n]
        value_std = float(sf.c @ x_std)
        return SimplexResult(
            status=OPTIMAL,
            x=used_sf.recover(x_std),
            value=used_sf.original_value(value_std),
            x_std=x_std,
            value_std=value_std,
            basis=tuple(solver.basis),
            statuses=tuple(solver.status[: sf.n]),
            sf=used_sf,
            iterations=solver.iterations,
        )
    if status == UNBOUNDED:
        ray = None
        if ray_std is not None:
            ray = used_sf.recover(ray_std[: sf.n])
        return SimplexResult(
            status=UNBOUNDED,
            sf=used_sf,
            ray=ray,
            iterations=solver.iterations,
            message="objective improves without limit along the reported ray",
        )
    if status == INFEASIBLE:
        return SimplexResult(
            status=INFEASIBLE,
            sf=used_sf,
            iterations=solver.iterations,
            message="no point satisfies all constraints and bounds",
        )
    return SimplexResult(
        status=NUMERIC_FAILURE,
        sf=used_sf,
        iterations=solver.iterations,
        message="pivoting failed to converge or hit a singular basis",
    )


def solve_model(model: LpModel, max_iter: int | None = None) -> SimplexResult:
    """Translate to standard form, clean dependent rows, and solve."""
    sf = to_standard_form(model)
    sf, dropped, inconsistent = drop_redundant_equalities(sf)
    if inconsistent:
        return SimplexResult(
            status=INFEASIBLE,
            sf=sf,
            message="dependent equality rows have conflicting right-hand sides",
        )
    res = solve_standard(sf, max_iter=max_iter)
    if dropped:
        res.message = (res.message + f" (dropped {len(dropped)} dependent rows)").strip()
    return res
