"""Delayed constraint generation for the separation LP on the reduced set.

The partial LP keeps one constraint per integer point collected so far; the
knapsack maximization either certifies the current inequality as valid or
returns a new (strengthened) point to add.  Coefficient bounds derived from the
normalizing facility keep every partial LP bounded, starting from no points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import lp
from .arcset import (FEAS_TOL, VIOLATION_TOL, ArcSetInstance, CutInequality, FracPoint,
                     Provenance, SeparationOutcome, Verdict, ceil_div)
from .knapsack import KnapsackQuery, maximize, strengthen

LP_TOL = 1e-9
KNAPSACK_TOL = 1e-9


class RowGenError(RuntimeError):
    """Inconsistent row generation state (repeated point, unbounded partial LP)."""


@dataclass
class TraceRecord:
    iteration: int
    lp_value: float
    knapsack_value: Optional[float]
    n_points: int

    def to_dict(self) -> dict:
        return {"iteration": self.iteration, "lp_value": self.lp_value,
                "knapsack_value": self.knapsack_value, "n_points": self.n_points}


@dataclass
class RowGenResult:
    outcome: SeparationOutcome
    points: list
    trace: list = field(default_factory=list)

    @property
    def lp_solves(self) -> int:
        return len(self.trace)

    @property
    def rows_added(self) -> int:
        return sum(1 for rec in self.trace if rec.knapsack_value is not None
                   and rec.knapsack_value > KNAPSACK_TOL)


def normalizing_facility(inst: ArcSetInstance, point: FracPoint) -> int:
    """Smallest-capacity facility carrying positive y (facility 0 if none does)."""
    cands = [t for t, v in enumerate(point.y) if v > 0]
    if not cands:
        return 0
    return min(cands, key=lambda t: (inst.capacities[t], t))


def partial_model(inst: ArcSetInstance, point: FracPoint, norm: int) -> lp.LpModel:
    """Bounded partial separation LP with no point constraints yet.

    Variable layout: alpha_0..alpha_{|Q|-1}, beta_0..beta_{|T|-1}, gamma.
    """
    a, b, c = inst.demands, inst.capacities, inst.existing
    bn = b[norm]
    m = lp.LpModel("max")
    for q, aq in enumerate(a):
        m.add_var(0.0, ceil_div(aq, bn), point.x[q], f"alpha{q + 1}")
    for t, bt in enumerate(b):
        if t == norm:
            m.add_var(1.0, 1.0, -point.y[t], f"beta{t + 1}")
        else:
            m.add_var(1.0, max(1, ceil_div(bt, bn)), -point.y[t], f"beta{t + 1}")
    m.add_var(min(-ceil_div(-c, bn), 0), math.inf, -1.0, "gamma")
    return m


def _point_row(x: Sequence[int], y: Sequence[int]) -> list[float]:
    return [float(v) for v in x] + [-float(v) for v in y] + [-1.0]


def run(inst: ArcSetInstance, point: FracPoint, *, norm: Optional[int] = None,
        seed_points: Sequence = (), use_strengthening: bool = True,
        violation_tol: float = VIOLATION_TOL, max_iterations: int = 10000) -> RowGenResult:
    """Separate ``point`` from conv(X) of ``inst`` (normally the reduced set)."""
    if norm is None:
        norm = normalizing_facility(inst, point)
    nq, nt = inst.n_commodities, inst.n_facilities
    model = partial_model(inst, point, norm)
    points: list = []
    seen = set()
    for x, y in seed_points:
        key = (tuple(int(v) for v in x), tuple(int(v) for v in y))
        if not inst.is_feasible(*key):
            raise RowGenError(f"seed point {key} is not in the set")
        if key not in seen:
            seen.add(key)
            points.append(key)
            model.add_row(_point_row(*key), "<=", 0.0)
    trace: list[TraceRecord] = []
    sol = None
    for it in range(1, max_iterations + 1):
        sol = lp.solve(model, sol.basis if sol is not None else None)
        if sol.status is lp.LpStatus.UNBOUNDED:
            raise RowGenError("partial separation LP unbounded despite coefficient bounds")
        if sol.status is not lp.LpStatus.OPTIMAL:
            raise RowGenError(f"partial separation LP reported {sol.status.value}")
        v = sol.objective
        if v <= LP_TOL:
            trace.append(TraceRecord(it, v, None, len(points)))
            return RowGenResult(_member(it, v), points, trace)
        vals = sol.values
        alpha = tuple(float(z) for z in vals[:nq])
        beta = tuple(float(z) for z in vals[nq:nq + nt])
        gamma = float(vals[-1])
        ans = maximize(KnapsackQuery(alpha, beta, gamma, inst.demands, inst.capacities,
                                     inst.existing))
        z = float(ans.value)
        trace.append(TraceRecord(it, v, z, len(points)))
        if z <= KNAPSACK_TOL:
            cut = CutInequality(alpha, beta, gamma)
            details = {"lp_solves": it, "rows_added": len(points) - len(seed_points),
                       "normalized_facility": norm, "reduced_costs": list(map(float, sol.reduced_costs))}
            if v <= violation_tol:
                out = SeparationOutcome(Verdict.MEMBER, stage="rowgen", details=details)
            else:
                out = SeparationOutcome(Verdict.VIOLATED, cut, v, Provenance.ROW_GENERATION,
                                        stage="rowgen", details=details)
            return RowGenResult(out, points, trace)
        x_new, y_new = ans.x, ans.y
        if use_strengthening:
            x_new, y_new = strengthen(inst.demands, inst.capacities, inst.existing, x_new, y_new)
        key = (tuple(x_new), tuple(y_new))
        if key in seen:
            raise RowGenError(f"knapsack returned an already generated point {key}")
        seen.add(key)
        points.append(key)
        model.add_row(_point_row(*key), "<=", 0.0)
    raise RowGenError("row generation iteration limit reached")


def _member(it: int, v: float) -> SeparationOutcome:
    return SeparationOutcome(Verdict.MEMBER, stage="rowgen",
                             details={"lp_solves": it, "lp_value": v})
