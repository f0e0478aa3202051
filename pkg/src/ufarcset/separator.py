"""Separation over conv(X) for one arc: fixing, shortcuts, row generation, refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import closed_form, rowgen
from .arcset import (FEAS_TOL, VIOLATION_TOL, ArcSetInstance, CutInequality, FracPoint,
                     Provenance, SeparationOutcome, Verdict, ceil_div, screen_trivial)
from .knapsack import cut_maximum
from .refine import (DEFAULT_POLICY, FixedRecord, LiftOrder, Rejected, ScalingPolicy, lift,
                     recompute_gamma, scale)

FIX_TOL = 1e-9


class SeparationError(RuntimeError):
    """A produced cut failed its final validity check."""


@dataclass
class ReducedProblem:
    free_x: list
    free_y: list
    cbar: int
    fixed: FixedRecord
    adjoined: Optional[int] = None

    def instance(self, inst: ArcSetInstance) -> ArcSetInstance:
        return ArcSetInstance(tuple(inst.demands[q] for q in self.free_x),
                              tuple(inst.capacities[t] for t in self.free_y), self.cbar)

    def point(self, point: FracPoint) -> FracPoint:
        return FracPoint(tuple(point.x[q] for q in self.free_x),
                         tuple(point.y[t] for t in self.free_y))

    def to_dict(self) -> dict:
        return {"free_x": list(self.free_x), "free_y": list(self.free_y), "cbar": self.cbar,
                "fixed": self.fixed.to_dict(), "adjoined_facility": self.adjoined}


def reduce(inst: ArcSetInstance, point: FracPoint, tol: float = FIX_TOL) -> ReducedProblem:
    fixed = FixedRecord()
    free_x = []
    for q, v in enumerate(point.x):
        if v <= tol:
            fixed.x_zero.append(q)
        elif v >= 1 - tol:
            fixed.x_one.append(q)
        else:
            free_x.append(q)
    free_y = [t for t, v in enumerate(point.y) if v > tol]
    fixed.y_zero.extend(t for t, v in enumerate(point.y) if v <= tol)
    cbar = inst.existing - sum(inst.demands[q] for q in fixed.x_one)
    return ReducedProblem(free_x, free_y, cbar, fixed)


def choose_normalized_facility(free_y: Sequence[int], ybar: Sequence[float],
                               capacities: Sequence[int]) -> int:
    """Smallest-capacity facility with positive y; the smallest overall if there is none."""
    cands = [t for t in free_y if ybar[t] > 0] or list(free_y)
    if not cands:
        return min(range(len(capacities)), key=lambda t: (capacities[t], t))
    return min(cands, key=lambda t: (capacities[t], t))


def _member(stage: str, **details) -> SeparationOutcome:
    return SeparationOutcome(Verdict.MEMBER, stage=stage, details=details)


def separate(inst: ArcSetInstance, point: FracPoint, reduced_costs: Optional[Mapping] = None, *,
             order: LiftOrder = LiftOrder.LIFT4, tolerance: float = VIOLATION_TOL,
             use_closed_form: bool = True, use_strengthening: bool = True,
             seed_points: Sequence = (), policy: ScalingPolicy = DEFAULT_POLICY) -> SeparationOutcome:
    """Decide whether ``point`` lies in conv(X); if not, return a valid violated inequality.

    ``seed_points`` are integer points of the reduced set used to initialize row
    generation; ``reduced_costs`` maps ('x', q) / ('y', t) to LP reduced costs
    for the LIFT3/LIFT4 orders.
    """
    trivial = screen_trivial(inst, point, FEAS_TOL)
    if trivial is not None:
        return trivial
    red = reduce(inst, point)
    base = {"reduced": red.to_dict()}
    if not red.free_x and not red.free_y:
        return _member("fixing", rule="all variables integral at zero facilities", **base)
    if not red.free_x and len(red.free_y) == 1:
        t = red.free_y[0]
        need = max(ceil_div(-red.cbar, inst.capacities[t]), 0)
        viol = need - point.y[t]
        if viol <= tolerance:
            return _member("fixing", rule="single facility rounding", **base)
        reduced_cut = CutInequality([], [1], -need, integralized=True)
        return _finish(inst, point, red, reduced_cut, reduced_cut, Provenance.SINGLE_FACILITY,
                       "fixing", order, reduced_costs, tolerance, dict(base))
    floor_cap = sum(inst.capacities[t] * math.floor(point.y[t] + FIX_TOL) for t in red.free_y)
    if sum(inst.demands[q] for q in red.free_x) <= floor_cap + red.cbar:
        return _member("fixing", rule="rounded-up x fits rounded-down y", **base)
    if not red.free_y:
        t = choose_normalized_facility([], point.y, inst.capacities)
        red.free_y = [t]
        red.fixed.y_zero.remove(t)
        red.adjoined = t
        base = {"reduced": red.to_dict()}
    rinst = red.instance(inst)
    rpoint = red.point(point)
    if use_closed_form:
        case = closed_form.detect(rinst, rpoint)
        if case.applicable:
            out = closed_form.build(case, rinst, rpoint, tolerance)
            details = dict(base, case=case.case.value)
            if out.verdict is Verdict.MEMBER:
                return _member("closed_form", **details)
            return _finish(inst, point, red, out.cut, out.cut, out.provenance, "closed_form",
                           order, reduced_costs, tolerance, details)
    norm_full = choose_normalized_facility(red.free_y, point.y, inst.capacities)
    norm = red.free_y.index(norm_full)
    res = rowgen.run(rinst, rpoint, norm=norm, seed_points=seed_points,
                     use_strengthening=use_strengthening, violation_tol=tolerance)
    details = dict(base, lp_solves=res.lp_solves, rows_added=res.rows_added,
                   trace=[r.to_dict() for r in res.trace], normalized_facility=norm_full)
    if res.outcome.verdict is Verdict.MEMBER:
        return _member("rowgen", **details)
    raw = res.outcome.cut
    scaled = scale(raw, policy)
    if isinstance(scaled, Rejected):
        details["rejected"] = scaled.reason
        return SeparationOutcome(Verdict.MEMBER, stage="scaling", cut_dropped=True,
                                 reduced_cut=raw, violation=res.outcome.violation, details=details)
    cut, mu = scaled
    cut = recompute_gamma(cut, rinst.demands, rinst.capacities, rinst.existing)
    details["mu"] = mu
    norm_coef = cut.beta[norm]
    viol = float(cut.violation(rpoint)) / float(norm_coef)
    if viol <= tolerance:
        details["rejected"] = "violation lost after scaling"
        return SeparationOutcome(Verdict.MEMBER, stage="scaling", cut_dropped=True,
                                 reduced_cut=cut, violation=viol, details=details)
    return _finish(inst, point, red, raw, cut, Provenance.ROW_GENERATION, "rowgen", order,
                   reduced_costs, tolerance, details)


def _finish(inst, point, red: ReducedProblem, raw_cut, cut, provenance, stage, order,
            reduced_costs, tolerance, details) -> SeparationOutcome:
    if red.fixed.empty:
        full = cut
        steps = []
    else:
        full, steps = lift(cut, inst.demands, inst.capacities, inst.existing, red.free_x,
                           red.free_y, red.fixed, order, reduced_costs)
    value, wx, wy = cut_maximum(full.alpha, full.beta, full.gamma, inst.demands, inst.capacities,
                                inst.existing)
    if value > 0:
        raise SeparationError(f"lifted inequality {full.render()} is violated by x={wx}, y={wy}")
    norm_full = choose_normalized_facility(red.free_y, point.y, inst.capacities)
    raw_viol = float(full.violation(point))
    scale_by = float(full.beta[norm_full]) if full.beta[norm_full] > 0 else 1.0
    viol = raw_viol / scale_by
    details = dict(details, lift_base=cut.to_dict(), lift_steps=[s.to_dict() for s in steps],
                   raw_violation=raw_viol, normalized_facility=norm_full)
    if viol <= tolerance:
        details["rejected"] = "violation lost after lifting"
        return SeparationOutcome(Verdict.MEMBER, stage=stage, cut_dropped=True, reduced_cut=cut,
                                 violation=viol, details=details)
    return SeparationOutcome(Verdict.VIOLATED, full, viol, provenance, stage=stage,
                             reduced_cut=raw_cut, details=details)
