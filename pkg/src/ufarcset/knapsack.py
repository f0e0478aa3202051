"""Exact maximization of ``alpha.x - beta.y - gamma`` over the arc set.

The unbounded ``y`` is eliminated by a two-level decomposition: a 0/1 subset-sum
table over the exact demand total ``s = a.x`` (best ``alpha.x`` per total) and a
covering table ``g(d) = min beta.y s.t. b.y >= d``.  Everything is indexed by
integers, so feasibility is never judged with a tolerance.  When the objective
data are rational the tables run on integers (scaled by the common denominator)
and the returned value is an exact ``Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

import numpy as np

from .arcset import ArcSetInstance

TIE_TOL = 1e-12


def _common_scale(values) -> Optional[int]:
    """lcm of denominators if every value is rational, else None."""
    scale = 1
    for v in values:
        if isinstance(v, bool) or not isinstance(v, Rational):
            return None
        scale = math.lcm(scale, Fraction(v).denominator)
    return scale


def cover_table(betas: Sequence[float], caps: Sequence[int], dmax: int):
    """g[d] = cheapest module purchase covering residual demand d, for d in 0..dmax.

    Returns (g, choice) where choice[d] is the facility bought first (or -1).
    """
    dmax = max(int(dmax), 0)
    betas = np.asarray(betas, dtype=float)
    if np.any(betas <= 0):
        raise ValueError("cover costs need strictly positive facility costs")
    g = np.zeros(dmax + 1)
    choice = np.full(dmax + 1, -1, dtype=int)
    for d in range(1, dmax + 1):
        best, arg = math.inf, -1
        for t, bt in enumerate(caps):
            val = betas[t] + g[max(0, d - bt)]
            if val < best - TIE_TOL:
                best, arg = val, t
        g[d] = best
        choice[d] = arg
    return g, choice


def _cover_witness(choice: np.ndarray, caps: Sequence[int], d: int, nt: int) -> list[int]:
    y = [0] * nt
    while d > 0:
        t = int(choice[d])
        y[t] += 1
        d = max(0, d - caps[t])
    return y


def cover_cost(betas: Sequence[float], caps: Sequence[int], d: int):
    """min beta.y s.t. b.y >= d, y integer >= 0; returns (cost, y)."""
    if d <= 0:
        return 0.0, [0] * len(caps)
    g, choice = cover_table(betas, caps, d)
    return float(g[d]), _cover_witness(choice, caps, d, len(caps))


@dataclass(frozen=True)
class KnapsackQuery:
    alpha: tuple
    beta: tuple
    gamma: object
    demands: tuple[int, ...]
    capacities: tuple[int, ...]
    cbar: int

    @classmethod
    def for_instance(cls, alpha, beta, gamma, inst: ArcSetInstance, cbar: Optional[int] = None):
        return cls(tuple(alpha), tuple(beta), gamma, inst.demands, inst.capacities,
                   inst.existing if cbar is None else int(cbar))


@dataclass(frozen=True)
class KnapsackAnswer:
    value: object
    x: tuple[int, ...]
    y: tuple[int, ...]


class KnapsackTables:
    """Subset-sum and cover tables for fixed (alpha, beta, a, b); answers W(C) for any C."""

    def __init__(self, alpha, beta, demands, capacities):
        if len(alpha) != len(demands) or len(beta) != len(capacities):
            raise ValueError("objective and data dimensions differ")
        self.demands = [int(v) for v in demands]
        self.capacities = [int(v) for v in capacities]
        scale = _common_scale(list(alpha) + list(beta))
        self.scale = scale
        if scale is None:
            self.alpha = np.asarray([float(v) for v in alpha])
            self.beta = np.asarray([float(v) for v in beta])
        else:
            self.alpha = np.asarray([float(Fraction(v) * scale) for v in alpha])
            self.beta = np.asarray([float(Fraction(v) * scale) for v in beta])
        if np.any(self.beta <= 0):
            raise ValueError("facility costs must be strictly positive")
        self.total = sum(self.demands)
        self._build_subset()
        self._cover_max = -1

    def _build_subset(self):
        S = self.total
        stages = np.full((len(self.demands) + 1, S + 1), -np.inf)
        stages[0, 0] = 0.0
        for k, (ak, vk) in enumerate(zip(self.demands, self.alpha)):
            prev = stages[k]
            cur = prev.copy()
            shifted = prev[:S + 1 - ak] + vk
            cur[ak:] = np.maximum(cur[ak:], shifted)
            stages[k + 1] = cur
        self.stages = stages
        self.best = stages[-1]

    def _ensure_cover(self, dmax: int):
        if dmax > self._cover_max:
            self.g, self.choice = cover_table(self.beta, self.capacities, max(dmax, 2 * self._cover_max))
            self._cover_max = len(self.g) - 1

    def _profile(self, C: int) -> np.ndarray:
        s = np.arange(self.total + 1)
        need = np.maximum(s - int(C), 0)
        self._ensure_cover(int(need.max()) if len(need) else 0)
        return self.best - self.g[need]

    def _unscale(self, v: float):
        if self.scale is None:
            return float(v)
        return Fraction(int(round(v)), self.scale)

    def w(self, C: int):
        """W(C) = max alpha.x - beta.y over a.x <= b.y + C."""
        prof = self._profile(C)
        return self._unscale(float(np.max(prof)))

    def argmax(self, C: int) -> tuple[object, tuple[int, ...], tuple[int, ...]]:
        prof = self._profile(C)
        top = float(np.max(prof))
        # smallest demand total among the optima
        s = int(np.flatnonzero(prof >= top - TIE_TOL * max(1.0, abs(top)))[0])
        x = self._traceback(s)
        y = _cover_witness(self.choice, self.capacities, max(s - int(C), 0), len(self.capacities))
        return self._unscale(top), tuple(x), tuple(y)

    def _traceback(self, s: int) -> list[int]:
        x = [0] * len(self.demands)
        for k in range(len(self.demands), 0, -1):
            ak, vk = self.demands[k - 1], self.alpha[k - 1]
            here = self.stages[k, s]
            if s >= ak and abs(self.stages[k - 1, s - ak] + vk - here) <= TIE_TOL * max(1.0, abs(here)):
                x[k - 1] = 1
                s -= ak
        return x


def maximize(query: KnapsackQuery) -> KnapsackAnswer:
    """Exact optimum of alpha.x - beta.y - gamma over X(cbar) with one argmax."""
    tables = KnapsackTables(query.alpha, query.beta, query.demands, query.capacities)
    val, x, y = tables.argmax(query.cbar)
    gamma = query.gamma
    if isinstance(val, Fraction) and isinstance(gamma, Rational) and not isinstance(gamma, bool):
        value = val - Fraction(gamma)
    else:
        value = float(val) - float(gamma)
    return KnapsackAnswer(value, x, y)


def w_of_capacity(alpha, beta, demands, capacities, C: int):
    return KnapsackTables(alpha, beta, demands, capacities).w(C)


def strengthen(demands: Sequence[int], capacities: Sequence[int], cbar: int,
               x: Sequence[int], y: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Greedily switch on commodities that still fit, largest demand first."""
    x = [int(v) for v in x]
    cap = sum(b * v for b, v in zip(capacities, y)) + cbar
    load = sum(a * v for a, v in zip(demands, x))
    order = sorted(range(len(demands)), key=lambda q: (-demands[q], q))
    for q in order:
        if x[q] == 0 and load + demands[q] <= cap:
            x[q] = 1
            load += demands[q]
    return tuple(x), tuple(int(v) for v in y)


def brute_force_max(alpha, beta, gamma, demands, capacities, cbar):
    """Enumeration reference for small instances (y_t up to the single-facility cover + 1)."""
    import itertools
    nq, nt = len(demands), len(capacities)
    total = sum(demands)
    best = -math.inf
    arg = None
    ymax = [max(0, -((-(total - cbar)) // b)) + 1 for b in capacities]
    for x in itertools.product((0, 1), repeat=nq):
        load = sum(a * v for a, v in zip(demands, x))
        ax = sum(al * v for al, v in zip(alpha, x))
        for y in itertools.product(*(range(m + 1) for m in ymax)):
            if load <= sum(b * v for b, v in zip(capacities, y)) + cbar:
                val = ax - sum(be * v for be, v in zip(beta, y)) - gamma
                if val > best:
                    best, arg = val, (x, y)
    return best, arg


def cut_maximum(alpha, beta, gamma, demands, capacities, cbar):
    """max alpha.x - beta.y - gamma over X(cbar) for any sign pattern of beta.

    A negative facility coefficient makes the maximum unbounded; a zero one
    means that facility covers any load for free.  Returns (value, x, y) with
    ``value = inf`` (and no witness) in the unbounded case.
    """
    if any(bt < 0 for bt in beta):
        return math.inf, None, None
    free = [t for t, bt in enumerate(beta) if bt == 0]
    if free:
        x = tuple(int(al > 0) for al in alpha)
        load = sum(a for a, v in zip(demands, x) if v)
        y = [0] * len(beta)
        if load > cbar:
            y[free[0]] = -((-(load - cbar)) // capacities[free[0]])
        top = sum((al for al in alpha if al > 0), Fraction(0) if _common_scale(alpha) else 0.0)
        return top - gamma, x, tuple(y)
    ans = maximize(KnapsackQuery(tuple(alpha), tuple(beta), gamma, tuple(demands),
                                 tuple(capacities), int(cbar)))
    return ans.value, ans.x, ans.y


def is_valid(cut, demands, capacities, cbar, tol=0.0) -> bool:
    """Validity of ``alpha.x <= beta.y + gamma`` over X(cbar); exact on rational cuts."""
    value, _, _ = cut_maximum(cut.alpha, cut.beta, cut.gamma, demands, capacities, cbar)
    return value <= tol
