"""Random small instances and points shared by the test modules."""

import numpy as np

from ufarcset.arcset import ArcSetInstance, FracPoint
from ufarcset import oracle


def random_instance(rng, max_q=5, max_t=2, max_demand=60, cap_range=(20, 120), c_range=(-40, 20)):
    nq = int(rng.integers(1, max_q + 1))
    nt = int(rng.integers(1, max_t + 1))
    while True:
        a = tuple(int(v) for v in rng.integers(1, max_demand + 1, nq))
        b = tuple(sorted(int(v) for v in rng.integers(cap_range[0], cap_range[1] + 1, nt)))
        c = int(rng.integers(c_range[0], c_range[1] + 1))
        if sum(a) - c > 0:
            return ArcSetInstance(a, b, c)


def random_lp_point(rng, inst, p_fix=0.25):
    """A point of the LP relaxation, with some coordinates at 0 or 1."""
    x = rng.random(inst.n_commodities)
    mask = rng.random(inst.n_commodities)
    x[mask < p_fix / 2] = 0.0
    x[(mask >= p_fix / 2) & (mask < p_fix)] = 1.0
    y = rng.random(inst.n_facilities) * (rng.random(inst.n_facilities) < 0.8)
    load = float(np.dot(inst.demands, x)) - inst.existing
    cap = float(np.dot(inst.capacities, y))
    if cap < load:
        t = int(rng.integers(0, inst.n_facilities))
        y[t] += (load - cap) / inst.capacities[t] + 1e-6
    return FracPoint(tuple(float(v) for v in x), tuple(float(v) for v in y))


def random_hull_point(rng, inst, k=3):
    """Convex combination of catalogue points (a member of conv X)."""
    pts = oracle.catalogue(inst)
    idx = rng.integers(0, len(pts), k)
    w = rng.dirichlet(np.ones(k))
    p = w @ pts[idx]
    nq = inst.n_commodities
    return FracPoint(tuple(float(v) for v in p[:nq]), tuple(float(v) for v in p[nq:]))


def closed_form_instance(rng, kind, nt=1, max_q=6, max_tries=2000):
    """Instance satisfying the closed-form assumptions.

    kind 'small': total demand fits one extra module; 'sandwich': every
    commodity but one fits, all of them do not.
    """
    for _ in range(max_tries):
        b1 = int(rng.integers(20, 201))
        c = int(rng.integers(-150, 51))
        r = max(-((c) // b1), 0)
        low = b1 * r + c
        if low >= b1 or low < 0:
            continue
        nq = int(rng.integers(1, max_q + 1)) if kind == "small" else int(rng.integers(2, max_q + 1))
        a = [int(v) for v in rng.integers(low + 1, b1 + 1, nq)]
        k = b1 * (r + 1) + c
        tot = sum(a)
        if kind == "small" and tot > k:
            continue
        if kind == "sandwich" and not (tot > k and tot - min(a) <= k):
            continue
        caps = [b1]
        for _ in range(nt - 1):
            caps.append(int(rng.integers(max(b1, tot - c), max(b1, tot - c) + 100)))
        return ArcSetInstance(tuple(a), tuple(sorted(caps)), c)
    raise RuntimeError("no instance found")


def interior_point(rng, inst, rest_below_one=True):
    """LP point with fractional x; mass outside facility 1 kept below one."""
    x = rng.uniform(0.02, 0.98, inst.n_commodities)
    nt = inst.n_facilities
    y = np.zeros(nt)
    if nt > 1:
        y[1:] = rng.dirichlet(np.ones(nt - 1)) * rng.uniform(0, 0.95 if rest_below_one else 1.5)
    load = float(np.dot(inst.demands, x)) - inst.existing - float(np.dot(inst.capacities[1:], y[1:]))
    y[0] = max(load / inst.capacities[0], 0) + rng.uniform(0, 0.6)
    return FracPoint(tuple(float(v) for v in x), tuple(float(v) for v in y))
