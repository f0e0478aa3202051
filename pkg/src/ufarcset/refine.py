"""Turning a floating-point reduced-set inequality into an integral one valid for X.

Scaling recovers small rationals from the LP coefficients, multiplies through by
their common denominator and recomputes the right-hand side exactly.  Lifting then
reintroduces the variables fixed during preprocessing, one at a time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .arcset import CutInequality, ceil_div
from .knapsack import KnapsackTables


@dataclass(frozen=True)
class ScalingPolicy:
    eps: float = 1e-9
    lambda_max: int = 10 ** 6
    mu_max: int = 10 ** 3


DEFAULT_POLICY = ScalingPolicy()


@dataclass(frozen=True)
class Rejected:
    reason: str


def rational_approx(v: float, policy: ScalingPolicy = DEFAULT_POLICY) -> Optional[Fraction]:
    """Best rational with denominator <= mu_max, if it is within eps of v."""
    fr = Fraction(v).limit_denominator(policy.mu_max) if not isinstance(v, Fraction) else v
    if fr.denominator > policy.mu_max or abs(fr.numerator) > policy.lambda_max:
        return None
    if abs(float(fr) - float(v)) > policy.eps:
        return None
    return fr


def scale(cut: CutInequality, policy: ScalingPolicy = DEFAULT_POLICY):
    """Integral multiple of the cut's alpha and beta, or Rejected.

    gamma is carried along scaled but should be recomputed afterwards.
    """
    coefs = list(cut.alpha) + list(cut.beta)
    fracs = []
    for v in coefs:
        fr = rational_approx(v, policy)
        if fr is None:
            return Rejected(f"no rational within {policy.eps} with denominator <= {policy.mu_max} for {v!r}")
        fracs.append(fr)
    mu = 1
    for fr in fracs:
        mu = math.lcm(mu, fr.denominator)
    if mu > policy.mu_max:
        return Rejected(f"common denominator {mu} exceeds {policy.mu_max}")
    scaled = [fr * mu for fr in fracs]
    if any(abs(v) > policy.mu_max for v in scaled):
        return Rejected(f"scaled coefficient exceeds {policy.mu_max}")
    nq = len(cut.alpha)
    gamma = Fraction(cut.gamma) * mu if isinstance(cut.gamma, Fraction) else float(cut.gamma) * mu
    gamma_int = math.ceil(gamma - 1e-9)
    return CutInequality(scaled[:nq], scaled[nq:], gamma_int, integralized=True), mu


def recompute_gamma(cut: CutInequality, demands: Sequence[int], capacities: Sequence[int],
                    cbar: int) -> CutInequality:
    """Tightest right-hand side for the cut's alpha, beta over X(cbar)."""
    w = w_value(cut.alpha, cut.beta, demands, capacities, cbar)
    return CutInequality(cut.alpha, cut.beta, w, integralized=cut.integralized
                         and Fraction(w).denominator == 1)


def w_value(alpha, beta, demands, capacities, C: int):
    """W(C) allowing zero facility costs (a free facility covers any load)."""
    if any(b == 0 for b in beta):
        return sum((a for a in alpha if a > 0), Fraction(0))
    return KnapsackTables(alpha, beta, demands, capacities).w(C)


class LiftOrder(str, enum.Enum):
    LIFT1 = "LIFT1"
    LIFT2 = "LIFT2"
    LIFT3 = "LIFT3"
    LIFT4 = "LIFT4"


@dataclass
class FixedRecord:
    """Variables fixed by preprocessing: x at 0, x at 1, y at 0 (full-set indices)."""

    x_zero: list = field(default_factory=list)
    x_one: list = field(default_factory=list)
    y_zero: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (self.x_zero or self.x_one or self.y_zero)

    def to_dict(self) -> dict:
        return {"x_zero": list(self.x_zero), "x_one": list(self.x_one), "y_zero": list(self.y_zero)}


def lifting_sequence(demands, capacities, fixed: FixedRecord, order: LiftOrder,
                     reduced_costs: Optional[Mapping] = None) -> list[tuple[str, int]]:
    """Permutation of the fixed variables; keys are ('x', q) or ('y', t)."""
    def coef(key):
        kind, i = key
        return demands[i] if kind == "x" else capacities[i]

    def tiebreak(key):
        return (0 if key[0] == "x" else 1, key[1])

    keys = [("x", q) for q in fixed.x_one] + [("x", q) for q in fixed.x_zero] + [("y", t) for t in fixed.y_zero]
    by_coef = sorted(keys, key=lambda k: (-coef(k), tiebreak(k)))
    if order is LiftOrder.LIFT1:
        ones = set(("x", q) for q in fixed.x_one)
        return [k for k in by_coef if k in ones] + [k for k in by_coef if k not in ones]
    if order is LiftOrder.LIFT2 or not reduced_costs:
        return by_coef
    rc = {k: float(reduced_costs.get(k, 0.0)) for k in keys}
    if order is LiftOrder.LIFT3:
        return sorted(keys, key=lambda k: (-rc[k], -coef(k), tiebreak(k)))
    return sorted(keys, key=lambda k: (rc[k], -coef(k), tiebreak(k)))


@dataclass
class LiftStep:
    var: str
    index: int
    fixed_at: int
    coefficient: object

    def to_dict(self) -> dict:
        c = self.coefficient
        return {"var": f"{self.var}{self.index + 1}", "fixed_at": self.fixed_at,
                "coefficient": int(c) if Fraction(c).denominator == 1 else str(c)}


def lift(cut: CutInequality, demands: Sequence[int], capacities: Sequence[int], existing: int,
         free_x: Sequence[int], free_y: Sequence[int], fixed: FixedRecord,
         order: LiftOrder = LiftOrder.LIFT4, reduced_costs: Optional[Mapping] = None):
    """Lift a cut valid on the reduced set (free_x, free_y) to one valid on the full set.

    ``cut`` has one coefficient per free variable in the given order.  Returns the
    full-space cut and the list of lifting steps.
    """
    alpha = {q: Fraction(v) for q, v in zip(free_x, cut.alpha)}
    beta = {t: Fraction(v) for t, v in zip(free_y, cut.beta)}
    gamma = Fraction(cut.gamma)
    cbar = existing - sum(demands[q] for q in fixed.x_one)
    steps = []
    ones = set(fixed.x_one)

    def tables():
        qs = sorted(alpha)
        ts = sorted(beta)
        return qs, ts, [alpha[q] for q in qs], [beta[t] for t in ts]

    for kind, k in lifting_sequence(demands, capacities, fixed, order, reduced_costs):
        qs, ts, al, be = tables()
        dq = [demands[q] for q in qs]
        bt = [capacities[t] for t in ts]
        if any(v == 0 for v in be):
            W = lambda C: w_value(al, be, dq, bt, C)  # noqa: E731
        else:
            tab = KnapsackTables(al, be, dq, bt)
            W = tab.w
        if kind == "x" and k not in ones:
            coef = gamma - Fraction(W(cbar - demands[k]))
            alpha[k] = coef
            steps.append(LiftStep("x", k, 0, coef))
        elif kind == "x":
            w_plus = Fraction(W(cbar + demands[k]))
            coef = w_plus - gamma
            alpha[k] = coef
            gamma = w_plus
            cbar += demands[k]
            steps.append(LiftStep("x", k, 1, coef))
        else:
            bk = capacities[k]
            lbar = max(1, ceil_div(sum(dq) - cbar, bk))
            best = max((Fraction(W(cbar + ell * bk)) - gamma) / ell for ell in range(1, lbar + 1))
            coef = max(best, Fraction(0))
            beta[k] = coef
            steps.append(LiftStep("y", k, 0, coef))
    nq, nt = len(demands), len(capacities)
    full = CutInequality([alpha.get(q, Fraction(0)) for q in range(nq)],
                         [beta.get(t, Fraction(0)) for t in range(nt)], gamma)
    integral = all(Fraction(v).denominator == 1 for v in full.alpha + full.beta + (full.gamma,))
    if integral:
        full = CutInequality(full.alpha, full.beta, full.gamma, integralized=True)
    return full, steps
