"""Direct construction of the most violated inequality in special cases.

All cases share two assumptions: every demand fits in one module of the smallest
facility, and every commodity alone forces one more module of it beyond ``r``.
With several facilities the larger ones must each carry all demand in one module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arcset import (FEAS_TOL, VIOLATION_TOL, ArcSetInstance, CutInequality, FracPoint,
                     Provenance, SeparationOutcome, Verdict, d_index, r_value)


class CaseId(str, enum.Enum):
    P5 = "P5"
    P6A = "P6a"
    P6B_1 = "P6b_1"
    P6B_2 = "P6b_2"
    P6B_3 = "P6b_3"
    P7A = "P7a"
    P7B = "P7b"
    P8A = "P8a"
    P8B = "P8b"
    P8C = "P8c"
    P8D_1 = "P8d_1"
    P8D_2 = "P8d_2"
    P8D_3 = "P8d_3"
    # large facilities alone already cover the point
    MEMBER = "Member"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class ClosedFormCase:
    case: CaseId
    r: int = 0
    d: int = 0
    q_tilde: list = field(default_factory=list)
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.case is not CaseId.NOT_APPLICABLE


def _na(reason: str) -> ClosedFormCase:
    return ClosedFormCase(CaseId.NOT_APPLICABLE, reason=reason)


def detect(inst: ArcSetInstance, point: FracPoint, tol: float = FEAS_TOL) -> ClosedFormCase:
    a, b, c = inst.demands, inst.capacities, inst.existing
    nq, nt = len(a), len(b)
    if nq == 0:
        return _na("no commodities")
    r = r_value(inst)
    if any(aq > b[0] for aq in a):
        return _na("a demand exceeds one module of the smallest facility")
    if any(b[0] * r + c >= aq for aq in a):
        return _na("a commodity fits without an extra module")
    total = sum(a)
    fits_one_more = total <= b[0] * (r + 1) + c
    sandwich = (not fits_one_more) and all(total - aq <= b[0] * (r + 1) + c for aq in a)
    if not fits_one_more and not sandwich:
        return _na("total demand outside both size conditions")
    d = d_index(point)
    xs = point.x
    sx = sum(xs)
    if nt == 1:
        if fits_one_more:
            return ClosedFormCase(CaseId.P5, r, d)
        if nq <= 2:
            return ClosedFormCase(CaseId.P6A, r, d)
        s = sx / (nq - 1)
        return ClosedFormCase(_three_way(s, xs[d], tol, CaseId.P6B_1, CaseId.P6B_2, CaseId.P6B_3), r, d)
    if any(total > bt + c for bt in b[1:]):
        return _na("a larger facility cannot carry all demand in one module")
    rest = sum(point.y[1:])
    if rest >= 1 - tol:
        return ClosedFormCase(CaseId.MEMBER, r, d, reason="large facilities cover the point")
    qt = [q for q, v in enumerate(xs) if v > rest + tol]
    if fits_one_more:
        return ClosedFormCase(CaseId.P7A if not qt else CaseId.P7B, r, d, qt)
    if not qt:
        return ClosedFormCase(CaseId.P8A, r, d, qt)
    if len(qt) < nq:
        return ClosedFormCase(CaseId.P8B, r, d, qt)
    if nq <= 2:
        return ClosedFormCase(CaseId.P8C, r, d, qt)
    s = (sx - rest) / (nq - 1)
    return ClosedFormCase(_three_way(s, xs[d], tol, CaseId.P8D_1, CaseId.P8D_2, CaseId.P8D_3), r, d, qt)


def _three_way(s, xd, tol, low, mid, high):
    if s <= xd + tol:
        return low
    if s <= 1 + tol:
        return mid
    return high


def cut_for(case: ClosedFormCase, inst: ArcSetInstance) -> CutInequality:
    """The inequality alpha.x <= beta.y + gamma of the detected case."""
    nq, nt = inst.n_commodities, inst.n_facilities
    r, d = case.r, case.d
    unit_d = [Fraction(int(q == d)) for q in range(nq)]
    ones = [Fraction(1)] * nq

    def beta(k):
        return [Fraction(1)] + [Fraction(k)] * (nt - 1)

    cid = case.case
    if cid in (CaseId.P5, CaseId.P6B_1):
        return CutInequality(unit_d, beta(0), -r)
    if cid is CaseId.P6A:
        return CutInequality(ones, beta(0), -r)
    if cid is CaseId.P6B_2:
        return CutInequality([Fraction(1, nq - 1)] * nq, beta(0), -r)
    if cid is CaseId.P6B_3:
        return CutInequality(ones, beta(0), -r + nq - 2)
    if cid in (CaseId.P7A, CaseId.P8A):
        return CutInequality([Fraction(0)] * nq, beta(r), -r)
    if cid in (CaseId.P7B, CaseId.P8B, CaseId.P8D_1):
        return CutInequality(unit_d, beta(r + 1), -r)
    if cid is CaseId.P8C:
        return CutInequality(ones, beta(r + nq), -r)
    if cid is CaseId.P8D_2:
        return CutInequality([Fraction(1, nq - 1)] * nq, beta(r + Fraction(nq, nq - 1)), -r)
    if cid is CaseId.P8D_3:
        return CutInequality(ones, beta(r + 2), -r + nq - 2)
    raise ValueError(f"no inequality for case {cid.value}")


_PROVENANCE = {"P5": Provenance.CLOSED_FORM_P5, "P6": Provenance.CLOSED_FORM_P6,
               "P7": Provenance.CLOSED_FORM_P7, "P8": Provenance.CLOSED_FORM_P8}


def build(case: ClosedFormCase, inst: ArcSetInstance, point: FracPoint,
          violation_tol: float = VIOLATION_TOL) -> SeparationOutcome:
    if case.case is CaseId.NOT_APPLICABLE:
        raise ValueError("closed form not applicable")
    details = {"case": case.case.value, "r": case.r, "d": case.d}
    if case.case is CaseId.MEMBER:
        return SeparationOutcome(Verdict.MEMBER, stage="closed_form", details=details)
    cut = cut_for(case, inst)
    viol = cut.violation(point)
    details["objective"] = viol
    if viol > violation_tol:
        return SeparationOutcome(Verdict.VIOLATED, cut, viol, _PROVENANCE[case.case.value[:2]],
                                 stage="closed_form", details=details)
    return SeparationOutcome(Verdict.MEMBER, stage="closed_form", details=details)


def try_closed_form(inst: ArcSetInstance, point: FracPoint,
                    violation_tol: float = VIOLATION_TOL) -> Optional[SeparationOutcome]:
    case = detect(inst, point)
    if not case.applicable:
        return None
    return build(case, inst, point, violation_tol)
