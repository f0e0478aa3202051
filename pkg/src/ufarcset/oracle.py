"""Enumeration-based reference answers for small instances.

Independent of the separation pipeline: it never calls the custom simplex or
row generation.  Every integer point of X is a catalogued point plus integer
multiples of the unit y directions, where the catalogue pairs each binary ``x``
with its inclusion-minimal module purchases.  LPs go through scipy's HiGHS.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog

from .arcset import ArcSetInstance, CutInequality, FracPoint, ceil_div
from .knapsack import cut_maximum

MAX_COMMODITIES = 12
MAX_FACILITIES = 3
MATCH_TOL = 1e-7
RANK_TOL = 1e-7


class BudgetExceeded(RuntimeError):
    """Instance too large for exhaustive enumeration."""


class InvalidCut(ValueError):
    pass


def check_budget(inst: ArcSetInstance):
    if inst.n_commodities > MAX_COMMODITIES or inst.n_facilities > MAX_FACILITIES:
        raise BudgetExceeded(f"enumeration limited to |Q| <= {MAX_COMMODITIES}, |T| <= {MAX_FACILITIES}; "
                             f"got |Q|={inst.n_commodities}, |T|={inst.n_facilities}")


def minimal_covers(capacities, load: int) -> list[tuple[int, ...]]:
    """All y with b.y >= load such that removing any single module breaks coverage."""
    if load <= 0:
        return [tuple(0 for _ in capacities)]
    bounds = [ceil_div(load, b) for b in capacities]
    out = []
    for y in itertools.product(*(range(u + 1) for u in bounds)):
        cap = sum(b * v for b, v in zip(capacities, y))
        if cap < load:
            continue
        if all(v == 0 or cap - b < load for b, v in zip(capacities, y)):
            out.append(tuple(y))
    return out


@lru_cache(maxsize=64)
def _catalogue(demands, capacities, existing):
    pts = []
    for x in itertools.product((0, 1), repeat=len(demands)):
        load = sum(a for a, v in zip(demands, x) if v) - existing
        for y in minimal_covers(capacities, load):
            pts.append(x + y)
    return np.array(pts, dtype=float)


def catalogue(inst: ArcSetInstance) -> np.ndarray:
    """Rows are (x, y) generators of P; the unit y directions are its rays."""
    check_budget(inst)
    return _catalogue(inst.demands, inst.capacities, inst.existing)


@dataclass
class MembershipResult:
    member: bool
    deviation: float


def membership(inst: ArcSetInstance, point: FracPoint) -> MembershipResult:
    """Is the point a convex combination of catalogue points plus a conic ray part?"""
    pts = catalogue(inst)
    k, n = pts.shape
    nq, nt = inst.n_commodities, inst.n_facilities
    target = np.array(list(point.x) + list(point.y), dtype=float)
    # variables: lambda (k), ray weights (nt), dev+ (n), dev- (n)
    rays = np.vstack([np.zeros((nq, nt)), np.eye(nt)])
    A_eq = np.hstack([pts.T, rays, np.eye(n), -np.eye(n)])
    A_eq = np.vstack([A_eq, np.concatenate([np.ones(k), np.zeros(nt + 2 * n)])])
    b_eq = np.concatenate([target, [1.0]])
    cost = np.concatenate([np.zeros(k + nt), np.ones(2 * n)])
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"membership LP failed: {res.message}")
    return MembershipResult(res.fun <= MATCH_TOL, float(res.fun))


@dataclass
class FullSeparation:
    value: float
    cut: CutInequality


def full_separation(inst: ArcSetInstance, point: FracPoint) -> FullSeparation:
    """max xbar.alpha - ybar.beta - gamma over all generator constraints, beta_1 = 1."""
    pts = catalogue(inst)
    nq, nt = inst.n_commodities, inst.n_facilities
    # variables alpha (nq, free), beta (nt, >= 0), gamma (free); linprog minimizes
    c = -np.concatenate([point.x, -np.asarray(point.y, dtype=float), [-1.0]])
    A_ub = np.hstack([pts[:, :nq], -pts[:, nq:], -np.ones((len(pts), 1))])
    b_ub = np.zeros(len(pts))
    bounds = [(None, None)] * nq + [(1, 1)] + [(0, None)] * (nt - 1) + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"separation LP failed: {res.message}")
    sol = res.x
    cut = CutInequality(tuple(sol[:nq]), tuple(sol[nq:nq + nt]), float(sol[-1]))
    return FullSeparation(float(-res.fun), cut)


def affine_rank(points: np.ndarray, tol: float = RANK_TOL) -> int:
    """Number of affinely independent rows."""
    if len(points) == 0:
        return 0
    diffs = points[1:] - points[0]
    if len(diffs) == 0:
        return 1
    return int(np.linalg.matrix_rank(diffs, tol=tol)) + 1


def tight_points(inst: ArcSetInstance, cut: CutInequality, tol: float = RANK_TOL) -> np.ndarray:
    pts = catalogue(inst)
    nq = inst.n_commodities
    alpha = np.array([float(v) for v in cut.alpha])
    beta = np.array([float(v) for v in cut.beta])
    slack = pts[:, :nq] @ alpha - pts[:, nq:] @ beta - float(cut.gamma)
    tight = pts[np.abs(slack) <= tol]
    extra = []
    if len(tight):
        for t, bt in enumerate(cut.beta):
            if bt == 0:
                p = tight[0].copy()
                p[nq + t] += 1
                extra.append(p)
    if extra:
        tight = np.vstack([tight] + extra)
    return tight


def facet_rank(inst: ArcSetInstance, cut: CutInequality) -> int:
    """Affine rank of the points of P on the cut's hyperplane (facet iff |Q|+|T|)."""
    check_budget(inst)
    value, x, y = cut_maximum(cut.alpha, cut.beta, cut.gamma, inst.demands, inst.capacities,
                              inst.existing)
    if value > 1e-9:
        raise InvalidCut(f"cut is violated by the integer point x={x}, y={y} (by {float(value)})")
    return affine_rank(tight_points(inst, cut))


def is_facet(inst: ArcSetInstance, cut: CutInequality) -> bool:
    return facet_rank(inst, cut) == inst.dim


def brute_force_valid(inst: ArcSetInstance, cut: CutInequality, tol: float = 1e-9) -> bool:
    """Validity by catalogue enumeration (rays need nonnegative beta)."""
    if any(b < 0 for b in cut.beta):
        return False
    pts = catalogue(inst)
    nq = inst.n_commodities
    alpha = np.array([float(v) for v in cut.alpha])
    beta = np.array([float(v) for v in cut.beta])
    return bool(np.all(pts[:, :nq] @ alpha - pts[:, nq:] @ beta - float(cut.gamma) <= tol))
