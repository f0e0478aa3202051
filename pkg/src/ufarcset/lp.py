"""Dense bounded-variable simplex with warm restarts after row additions.

Rows are turned into equalities with one slack per row (``a.x + s = rhs``), the
slack's bounds encoding the row sense.  Phase 1 minimizes the total bound
violation of basic variables starting from any basis, so the same code path
serves cold starts and warm starts; a bounded dual simplex is tried first when
the warm basis is still dual feasible (the usual case after appending cuts).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

PIVOT_TOL = 1e-9
PRIMAL_TOL = 1e-9
DUAL_TOL = 1e-9
REFACTOR_EVERY = 60
DEGENERATE_LIMIT = 50

inf = math.inf


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class LpError(RuntimeError):
    """Internal solver failure (iteration limit, singular basis)."""


@dataclass(frozen=True)
class BasisToken:
    """Opaque warm-start data: basic variable indices and nonbasics at upper bound."""

    n_vars: int
    basic: tuple[int, ...]
    at_upper: frozenset


@dataclass
class LpSolution:
    status: LpStatus
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = math.nan
    basis: Optional[BasisToken] = None
    active: list = field(default_factory=list)
    reduced_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class LpModel:
    """max (or min) obj.x subject to rows and lb <= x <= ub."""

    def __init__(self, sense: str = "max"):
        if sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        self.sense = sense
        self.obj: list[float] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.names: list[str] = []
        self.rows: list[tuple[dict, str, float]] = []

    @property
    def n_vars(self) -> int:
        return len(self.obj)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_var(self, lb: float = 0.0, ub: float = inf, obj: float = 0.0,
                name: Optional[str] = None) -> int:
        if lb > ub:
            raise ValueError(f"variable bounds reversed: {lb} > {ub}")
        self.obj.append(float(obj))
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.names.append(name or f"v{len(self.obj) - 1}")
        return len(self.obj) - 1

    def add_row(self, coeffs: Union[Mapping[int, float], Sequence[float]], sense: str,
                rhs: float) -> int:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown row sense {sense!r}")
        if isinstance(coeffs, Mapping):
            row = {int(j): float(v) for j, v in coeffs.items() if v != 0}
            if any(not 0 <= j < self.n_vars for j in row):
                raise ValueError("row refers to an unknown variable")
        else:
            if len(coeffs) != self.n_vars:
                raise ValueError(f"row has {len(coeffs)} coefficients, model has {self.n_vars} variables")
            row = {j: float(v) for j, v in enumerate(coeffs) if v != 0}
        self.rows.append((row, sense, float(rhs)))
        return len(self.rows) - 1

    def copy(self) -> "LpModel":
        m = LpModel(self.sense)
        m.obj, m.lb, m.ub, m.names = list(self.obj), list(self.lb), list(self.ub), list(self.names)
        m.rows = [(dict(r), s, b) for r, s, b in self.rows]
        return m

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.zeros((self.n_rows, self.n_vars))
        b = np.zeros(self.n_rows)
        for i, (row, _, rhs) in enumerate(self.rows):
            for j, v in row.items():
                A[i, j] = v
            b[i] = rhs
        return A, b

    def row_activity(self, values: np.ndarray) -> np.ndarray:
        A, _ = self.dense()
        return A @ values if self.n_rows else np.zeros(0)


class _Tableau:
    def __init__(self, model: LpModel):
        n, m = model.n_vars, model.n_rows
        self.n, self.m = n, m
        A, b = model.dense()
        self.A = np.hstack([A, np.eye(m)]) if m else np.zeros((0, n))
        self.b = b
        sign = 1.0 if model.sense == "max" else -1.0
        self.cost = np.concatenate([sign * np.asarray(model.obj, dtype=float), np.zeros(m)])
        slack_lb = [0.0 if s == "<=" else (-inf if s == ">=" else 0.0) for _, s, _ in model.rows]
        slack_ub = [inf if s == "<=" else 0.0 for _, s, _ in model.rows]
        self.lb = np.array(list(model.lb) + slack_lb, dtype=float)
        self.ub = np.array(list(model.ub) + slack_ub, dtype=float)
        self.N = n + m
        self.iterations = 0
        self.bland = False
        self.degenerate_run = 0
        self.since_refactor = 0

    # -- basis management ---------------------------------------------------------
    def set_basis(self, basic: Sequence[int], at_upper=frozenset()):
        self.basic = np.array(basic, dtype=int)
        self.is_basic = np.zeros(self.N, dtype=bool)
        self.is_basic[self.basic] = True
        self.x = np.zeros(self.N)
        for j in range(self.N):
            if self.is_basic[j]:
                continue
            lo, hi = self.lb[j], self.ub[j]
            if j in at_upper and math.isfinite(hi):
                self.x[j] = hi
            elif math.isfinite(lo):
                self.x[j] = lo
            elif math.isfinite(hi):
                self.x[j] = hi
            else:
                self.x[j] = 0.0
        self.refactor()

    def refactor(self):
        if self.m == 0:
            self.T = np.zeros((0, self.N))
            return
        B = self.A[:, self.basic]
        self.T = np.linalg.solve(B, self.A)
        nonbasic = ~self.is_basic
        rhs = self.b - self.A[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basic] = np.linalg.solve(B, rhs)
        self.since_refactor = 0

    def pivot(self, r: int, j: int):
        piv = self.T[r, j]
        self.T[r] /= piv
        col = self.T[:, j].copy()
        col[r] = 0.0
        self.T -= np.outer(col, self.T[r])
        leaving = self.basic[r]
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.basic[r] = j
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        if self.m == 0:
            return cost.copy()
        d = cost - cost[self.basic] @ self.T
        d[self.basic] = 0.0
        return d

    def infeasibility(self) -> float:
        xb = self.x[self.basic]
        lo, hi = self.lb[self.basic], self.ub[self.basic]
        return float(np.sum(np.maximum(lo - xb, 0.0)) + np.sum(np.maximum(xb - hi, 0.0)))

    def _tick(self, theta: float):
        self.iterations += 1
        if theta <= 1e-12:
            self.degenerate_run += 1
            if self.degenerate_run >= DEGENERATE_LIMIT:
                self.bland = True
        else:
            self.degenerate_run = 0
        if self.iterations > 50 * (self.N + 10):
            raise LpError("simplex iteration limit reached")

    # -- primal simplex -----------------------------------------------------------
    def _phase1_cost(self) -> np.ndarray:
        c = np.zeros(self.N)
        xb = self.x[self.basic]
        c[self.basic[xb < self.lb[self.basic] - PRIMAL_TOL]] = 1.0
        c[self.basic[xb > self.ub[self.basic] + PRIMAL_TOL]] = -1.0
        return c

    def _choose_entering(self, d: np.ndarray):
        best, best_j, best_dir = 0.0, -1, 0
        for j in np.flatnonzero(~self.is_basic):
            lo, hi = self.lb[j], self.ub[j]
            if lo == hi:
                continue
            xj = self.x[j]
            can_up = xj < hi - PRIMAL_TOL or not math.isfinite(hi)
            can_down = xj > lo + PRIMAL_TOL or not math.isfinite(lo)
            dj = d[j]
            if dj > DUAL_TOL and can_up:
                direction = 1
            elif dj < -DUAL_TOL and can_down:
                direction = -1
            else:
                continue
            if self.bland:
                return j, direction
            if abs(dj) > best:
                best, best_j, best_dir = abs(dj), j, direction
        return best_j, best_dir

    def primal(self, phase: int) -> LpStatus:
        while True:
            if phase == 1:
                if self.infeasibility() <= PRIMAL_TOL * max(1, self.m):
                    return LpStatus.OPTIMAL
                cost = self._phase1_cost()
            else:
                cost = self.cost
            d = self.reduced_costs(cost)
            j, direction = self._choose_entering(d)
            if j < 0:
                if phase == 1:
                    return LpStatus.INFEASIBLE
                return LpStatus.OPTIMAL
            col = self.T[:, j] if self.m else np.zeros(0)
            theta = inf
            leave = -1
            leave_to = 0.0
            if math.isfinite(self.lb[j]) and math.isfinite(self.ub[j]):
                theta = self.ub[j] - self.lb[j]
            best_piv = 0.0
            for i in range(self.m):
                rate = -direction * col[i]
                if abs(rate) <= PIVOT_TOL:
                    continue
                k = self.basic[i]
                xk, lo, hi = self.x[k], self.lb[k], self.ub[k]
                if rate > 0:
                    if xk < lo - PRIMAL_TOL:
                        bound = lo
                    elif xk <= hi + PRIMAL_TOL:
                        bound = hi
                    else:
                        continue
                else:
                    if xk > hi + PRIMAL_TOL:
                        bound = hi
                    elif xk >= lo - PRIMAL_TOL:
                        bound = lo
                    else:
                        continue
                if not math.isfinite(bound):
                    continue
                ti = max((bound - xk) / rate, 0.0)
                if ti < theta - 1e-12:
                    theta, leave, leave_to, best_piv = ti, i, bound, abs(rate)
                elif ti <= theta + 1e-12 and leave >= 0:
                    if self.bland:
                        if self.basic[i] < self.basic[leave]:
                            theta, leave, leave_to, best_piv = min(ti, theta), i, bound, abs(rate)
                    elif abs(rate) > best_piv:
                        theta, leave, leave_to, best_piv = min(ti, theta), i, bound, abs(rate)
            if not math.isfinite(theta):
                if phase == 1:
                    raise LpError("unbounded phase-1 direction")
                return LpStatus.UNBOUNDED
            self.x[j] += direction * theta
            if self.m:
                self.x[self.basic] -= direction * theta * col
            if leave < 0:
                # bound flip of the entering variable
                self.x[j] = self.ub[j] if direction > 0 else self.lb[j]
            else:
                k = self.basic[leave]
                self.pivot(leave, j)
                self.x[k] = leave_to
            self._tick(theta)

    # -- dual simplex -------------------------------------------------------------
    def dual_feasible(self) -> bool:
        d = self.reduced_costs(self.cost)
        for j in np.flatnonzero(~self.is_basic):
            lo, hi = self.lb[j], self.ub[j]
            if lo == hi:
                continue
            at_lo = math.isfinite(lo) and self.x[j] <= lo + PRIMAL_TOL
            at_hi = math.isfinite(hi) and self.x[j] >= hi - PRIMAL_TOL
            if at_lo and d[j] > 1e-7:
                return False
            if at_hi and d[j] < -1e-7:
                return False
            if not at_lo and not at_hi and abs(d[j]) > 1e-7:
                return False
        return True

    def dual(self) -> Optional[LpStatus]:
        """Bounded dual simplex; None means give up and let the primal finish."""
        while True:
            xb = self.x[self.basic]
            lo, hi = self.lb[self.basic], self.ub[self.basic]
            below = lo - xb
            above = xb - hi
            worst = np.maximum(below, above)
            r = int(np.argmax(worst)) if self.m else -1
            if r < 0 or worst[r] <= PRIMAL_TOL:
                return LpStatus.OPTIMAL
            to_lower = below[r] > above[r]
            d = self.reduced_costs(self.cost)
            row = self.T[r]
            best, enter = inf, -1
            for j in np.flatnonzero(~self.is_basic):
                jlo, jhi = self.lb[j], self.ub[j]
                if jlo == jhi:
                    continue
                a = row[j]
                if abs(a) <= PIVOT_TOL:
                    continue
                at_lo = math.isfinite(jlo) and self.x[j] <= jlo + PRIMAL_TOL
                at_hi = math.isfinite(jhi) and self.x[j] >= jhi - PRIMAL_TOL
                free = not at_lo and not at_hi
                # leaving variable must increase (to_lower) or decrease
                want_neg = to_lower
                if at_lo:
                    ok = (a < 0) if want_neg else (a > 0)
                elif at_hi:
                    ok = (a > 0) if want_neg else (a < 0)
                else:
                    ok = free
                if not ok:
                    continue
                ratio = abs(d[j] / a)
                if ratio < best - 1e-12 or (ratio <= best + 1e-12 and enter >= 0 and abs(a) > abs(row[enter])):
                    best, enter = ratio, j
            if enter < 0:
                return LpStatus.INFEASIBLE
            k = self.basic[r]
            target = self.lb[k] if to_lower else self.ub[k]
            delta = (self.x[k] - target) / row[enter]
            col = self.T[:, enter].copy()
            self.x[enter] += delta
            self.x[self.basic] -= delta * col
            self.pivot(r, enter)
            self.x[k] = target
            self._tick(abs(delta))
            if self.iterations > 20 * (self.N + 10):
                return None

    # -- results ------------------------------------------------------------------
    def token(self) -> BasisToken:
        at_upper = frozenset(int(j) for j in np.flatnonzero(~self.is_basic)
                             if math.isfinite(self.ub[j]) and self.x[j] >= self.ub[j] - PRIMAL_TOL
                             and self.lb[j] != self.ub[j])
        return BasisToken(self.n, tuple(int(j) for j in self.basic), at_upper)


def _initial_basis(tab: _Tableau, model: LpModel, warm: Optional[BasisToken]):
    slack_basis = list(range(tab.n, tab.n + tab.m))
    if warm is None or warm.n_vars != tab.n or len(warm.basic) > tab.m:
        return slack_basis, frozenset(), False
    old_m = len(warm.basic)
    basic = list(warm.basic) + list(range(tab.n + old_m, tab.n + tab.m))
    if any(not 0 <= j < tab.N for j in basic) or len(set(basic)) != len(basic):
        return slack_basis, frozenset(), False
    if tab.m and abs(np.linalg.det(tab.A[:, basic])) < 1e-12:
        if np.linalg.matrix_rank(tab.A[:, basic]) < tab.m:
            return slack_basis, frozenset(), False
    return basic, warm.at_upper, True


def solve(model: LpModel, basis: Optional[BasisToken] = None) -> LpSolution:
    """Solve ``model``; ``basis`` (from a previous solve, possibly with fewer rows) warm-starts."""
    tab = _Tableau(model)
    basic, at_upper, warm = _initial_basis(tab, model, basis)
    tab.set_basis(basic, at_upper)
    status = None
    if warm and tab.m and tab.dual_feasible():
        status = tab.dual()
        if status is LpStatus.INFEASIBLE:
            status = None
    if status is None or tab.infeasibility() > PRIMAL_TOL * max(1, tab.m):
        tab.bland = False
        status = tab.primal(phase=1)
        if status is LpStatus.INFEASIBLE:
            return LpSolution(LpStatus.INFEASIBLE, iterations=tab.iterations)
    tab.bland = False
    tab.degenerate_run = 0
    status = tab.primal(phase=2)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, iterations=tab.iterations)
    tab.refactor()
    if tab.infeasibility() > 1e-7 * max(1, tab.m):
        # drift after refactorization: polish from the final basis
        tab.primal(phase=1)
        tab.primal(phase=2)
    values = np.clip(tab.x[:tab.n], tab.lb[:tab.n], tab.ub[:tab.n])
    obj = float(np.dot(np.asarray(model.obj), values))
    d = tab.reduced_costs(tab.cost)[:tab.n]
    if model.sense == "min":
        d = -d
    active = []
    for j in np.flatnonzero(~tab.is_basic):
        if j < tab.n:
            if tab.lb[j] == tab.ub[j] or tab.x[j] <= tab.lb[j] + PRIMAL_TOL:
                active.append(("lb", int(j)))
            elif tab.x[j] >= tab.ub[j] - PRIMAL_TOL:
                active.append(("ub", int(j)))
        else:
            active.append(("row", int(j - tab.n)))
    return LpSolution(LpStatus.OPTIMAL, values, obj, tab.token(), active, d, tab.iterations)


def resolve(model: LpModel, previous: LpSolution) -> LpSolution:
    """Re-solve after rows were appended, starting from ``previous``'s basis."""
    return solve(model, previous.basis if previous is not None else None)
