"""Unsplittable multi-commodity network design: instances, LP relaxation, root cut loop."""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import lp
from .arcset import ArcSetInstance, CutInequality, FracPoint, InstanceError, Verdict
from .knapsack import cover_cost, cut_maximum
from .refine import LiftOrder
from .separator import separate

# name -> (module capacities, module costs)
PROFILES = {
    "1_1_1": ((130,), (10000,)),
    "2_1_1": ((130, 50), (10000, 5000)),
    "3_1_1": ((130, 50, 20), (10000, 5000, 2500)),
    "1_1_2": ((130,), (18000,)),
    "2_1_2": ((130, 50), (18000, 9000)),
    "3_1_2": ((130, 50, 20), (18000, 9000, 5000)),
    "1_1_3": ((130,), (25000,)),
    "2_1_3": ((130, 50), (25000, 13000)),
    "3_1_3": ((130, 50, 20), (25000, 13000, 9000)),
    "1_2_1": ((170,), (10000,)),
    "2_2_1": ((170, 70), (10000, 5000)),
    "3_2_1": ((170, 70, 30), (10000, 5000, 2500)),
    "1_2_2": ((170,), (18000,)),
    "2_2_2": ((170, 70), (18000, 9000)),
    "3_2_2": ((170, 70, 30), (18000, 9000, 5000)),
    "1_2_3": ((170,), (25000,)),
    "2_2_3": ((170, 70), (25000, 13000)),
    "3_2_3": ((170, 70, 30), (25000, 13000, 9000)),
    "1_3_1": ((200,), (10000,)),
    "2_3_1": ((200, 80), (10000, 5000)),
    "3_3_1": ((200, 80, 30), (10000, 5000, 2500)),
    "1_3_2": ((200,), (18000,)),
    "2_3_2": ((200, 80), (18000, 9000)),
    "3_3_2": ((200, 80, 30), (18000, 9000, 5000)),
    # listed with capacity 170 in the source table, kept as listed
    "1_3_3": ((170,), (25000,)),
    "2_3_3": ((200, 80), (25000, 13000)),
    "3_3_3": ((200, 80, 30), (25000, 13000, 9000)),
}


@dataclass
class Arc:
    tail: int
    head: int
    existing: int
    install_costs: tuple


@dataclass
class Commodity:
    source: int
    sink: int
    demand: int
    routing_costs: tuple  # one per arc


@dataclass
class NetworkInstance:
    nodes: int
    arcs: list
    facilities: list  # (capacity, base cost)
    commodities: list

    def __post_init__(self):
        seen = set()
        for a in self.arcs:
            if not (0 <= a.tail < self.nodes and 0 <= a.head < self.nodes) or a.tail == a.head:
                raise InstanceError(f"bad arc ({a.tail}, {a.head})")
            if (a.tail, a.head) in seen:
                raise InstanceError(f"duplicate arc ({a.tail}, {a.head})")
            seen.add((a.tail, a.head))
            if len(a.install_costs) != len(self.facilities):
                raise InstanceError("install_costs must list one cost per facility")
        if not self.facilities:
            raise InstanceError("at least one facility is required")
        for cap, _ in self.facilities:
            if int(cap) != cap or cap <= 0:
                raise InstanceError("facility capacities must be positive integers")
        for k in self.commodities:
            if int(k.demand) != k.demand or k.demand <= 0:
                raise InstanceError("demands must be positive integers")
            if not (0 <= k.source < self.nodes and 0 <= k.sink < self.nodes) or k.source == k.sink:
                raise InstanceError(f"bad commodity endpoints ({k.source}, {k.sink})")
            if len(k.routing_costs) != len(self.arcs):
                raise InstanceError("routing_costs must list one cost per arc")

    @property
    def facility_order(self) -> list[int]:
        """Facility indices sorted by capacity (the arc-set convention)."""
        return sorted(range(len(self.facilities)), key=lambda t: (self.facilities[t][0], t))

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "arcs": [{"tail": a.tail, "head": a.head, "existing": a.existing,
                      "install_costs": list(a.install_costs)} for a in self.arcs],
            "facilities": [{"capacity": c, "cost": p} for c, p in self.facilities],
            "commodities": [{"source": k.source, "sink": k.sink, "demand": k.demand,
                             "routing_costs": list(k.routing_costs)} for k in self.commodities],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkInstance":
        try:
            facilities = [(int(f["capacity"]), float(f["cost"])) for f in d["facilities"]]
            arcs = []
            for i, a in enumerate(d["arcs"]):
                costs = a.get("install_costs")
                if costs is None:
                    costs = [p for _, p in facilities]
                arcs.append(Arc(int(a["tail"]), int(a["head"]), int(a.get("existing", 0)),
                                tuple(float(v) for v in costs)))
            comms = []
            for k in d["commodities"]:
                rc = k.get("routing_costs", 0.0)
                if isinstance(rc, (int, float)):
                    rc = [rc] * len(arcs)
                comms.append(Commodity(int(k["source"]), int(k["sink"]), int(k["demand"]),
                                       tuple(float(v) for v in rc)))
            return cls(int(d["nodes"]), arcs, facilities, comms)
        except KeyError as exc:
            raise InstanceError(f"network instance missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InstanceError):
                raise
            raise InstanceError(f"malformed network instance: {exc}") from exc


def load_network(path) -> NetworkInstance:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return NetworkInstance.from_dict(d)


def _reachable(n: int, arcs, s: int) -> set:
    adj = [[] for _ in range(n)]
    for u, v in arcs:
        adj[u].append(v)
    seen, stack = {s}, [s]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def generate(seed: int, nodes: int = 12, commodities: int = 5, profile: str = "3_1_1",
             arc_factor: int = 3, max_retries: int = 20) -> NetworkInstance:
    """Random strongly connected digraph with Table-1 facility data."""
    if profile not in PROFILES:
        raise InstanceError(f"unknown profile {profile!r}; choose one of {sorted(PROFILES)}")
    if nodes < 2 or commodities < 1:
        raise InstanceError("need at least 2 nodes and 1 commodity")
    caps, costs = PROFILES[profile]
    rng = random.Random(seed)
    for _ in range(max_retries):
        order = list(range(nodes))
        rng.shuffle(order)
        arcs = set()
        for i in range(1, nodes):
            parent = order[rng.randrange(i)]
            arcs.add((parent, order[i]))
        rng.shuffle(order)
        for i in range(1, nodes):
            parent = order[rng.randrange(i)]
            arcs.add((order[i], parent))
        target = min(arc_factor * nodes, nodes * (nodes - 1))
        while len(arcs) < target:
            u, v = rng.randrange(nodes), rng.randrange(nodes)
            if u != v:
                arcs.add((u, v))
        arcs = sorted(arcs)
        if all(len(_reachable(nodes, arcs, s)) == nodes for s in range(nodes)):
            break
    else:
        raise InstanceError("could not generate a strongly connected graph")
    routing = [rng.randint(1, 10) for _ in arcs]
    comms = []
    for _ in range(commodities):
        s = rng.randrange(nodes)
        t = rng.randrange(nodes - 1)
        t = t + 1 if t >= s else t
        comms.append(Commodity(s, t, rng.randint(10, 190), tuple(float(w) for w in routing)))
    arc_objs = [Arc(u, v, 0, tuple(float(c) for c in costs)) for u, v in arcs]
    return NetworkInstance(nodes, arc_objs, [(c, float(p)) for c, p in zip(caps, costs)], comms)


class _Layout:
    def __init__(self, inst: NetworkInstance):
        nq, nt = len(inst.commodities), len(inst.facilities)
        self.nq, self.nt = nq, nt
        self.x0 = 0
        self.y0 = len(inst.arcs) * nq

    def x(self, arc: int, q: int) -> int:
        return self.x0 + arc * self.nq + q

    def y(self, arc: int, t: int) -> int:
        return self.y0 + arc * self.nt + t


def lp_relaxation(inst: NetworkInstance) -> lp.LpModel:
    """min routing + install cost, flow balance, arc capacities; x in [0,1], y >= 0."""
    lay = _Layout(inst)
    m = lp.LpModel("min")
    for e, arc in enumerate(inst.arcs):
        for q, k in enumerate(inst.commodities):
            m.add_var(0.0, 1.0, k.routing_costs[e], f"x_{arc.tail}_{arc.head}_{q + 1}")
    for e, arc in enumerate(inst.arcs):
        for t in range(lay.nt):
            m.add_var(0.0, lp.inf, arc.install_costs[t], f"y_{arc.tail}_{arc.head}_{t + 1}")
    for q, k in enumerate(inst.commodities):
        for i in range(inst.nodes):
            if i == k.sink:
                continue  # implied by the other balance rows
            row = {}
            for e, arc in enumerate(inst.arcs):
                if arc.tail == i:
                    row[lay.x(e, q)] = row.get(lay.x(e, q), 0.0) + 1.0
                elif arc.head == i:
                    row[lay.x(e, q)] = row.get(lay.x(e, q), 0.0) - 1.0
            m.add_row(row, "=", 1.0 if i == k.source else 0.0)
    for e, arc in enumerate(inst.arcs):
        row = {lay.x(e, q): float(k.demand) for q, k in enumerate(inst.commodities)}
        for t, (cap, _) in enumerate(inst.facilities):
            row[lay.y(e, t)] = -float(cap)
        m.add_row(row, "<=", float(arc.existing))
    return m


def arc_set(inst: NetworkInstance, arc: int) -> Optional[ArcSetInstance]:
    """The arc's capacity set, facilities sorted by capacity; None if never binding."""
    order = inst.facility_order
    demands = tuple(k.demand for k in inst.commodities)
    if sum(demands) <= inst.arcs[arc].existing:
        return None
    return ArcSetInstance(demands, tuple(inst.facilities[t][0] for t in order),
                          inst.arcs[arc].existing)


@dataclass
class LoopSettings:
    max_rounds: int = 50
    rel_improvement: float = 1e-4
    order: LiftOrder = LiftOrder.LIFT4
    tolerance: float = 1e-6
    compute_upper_bound: bool = True


@dataclass
class RootLoopReport:
    status: str
    z_lp: Optional[float] = None
    z_root: Optional[float] = None
    rounds: int = 0
    trace: list = field(default_factory=list)
    cuts_added: dict = field(default_factory=dict)
    cuts_dropped: int = 0
    z_ub: Optional[float] = None
    gap_closed: Optional[float] = None
    stop_reason: str = ""
    cuts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"status": self.status, "z_lp": self.z_lp, "z_root": self.z_root,
                "rounds": self.rounds, "trace": list(self.trace),
                "cuts_added": dict(self.cuts_added), "cuts_dropped": self.cuts_dropped,
                "z_ub": self.z_ub, "gap_closed": self.gap_closed, "stop_reason": self.stop_reason,
                "cuts": [{"arc": a, "round": r, "cut": c.to_dict(), "text": c.render()}
                         for a, r, c in self.cuts]}

    @classmethod
    def from_dict(cls, d: dict) -> "RootLoopReport":
        return cls(d["status"], d.get("z_lp"), d.get("z_root"), int(d.get("rounds", 0)),
                   list(d.get("trace", [])), dict(d.get("cuts_added", {})),
                   int(d.get("cuts_dropped", 0)), d.get("z_ub"), d.get("gap_closed"),
                   d.get("stop_reason", ""),
                   [(c["arc"], c["round"], CutInequality.from_dict(c["cut"])) for c in d.get("cuts", [])])


def gap_closed(z_lp: float, z_root: float, z_ub: float) -> Optional[float]:
    """Percentage of the LP-to-upper-bound gap closed by the cuts (None if undefined)."""
    den = z_ub - z_lp
    if abs(den) < 1e-9 or den < 0:
        return None
    return 100.0 * (z_root - z_lp) / den


def _arc_point(inst, lay, values, e):
    order = inst.facility_order
    x = tuple(float(min(max(values[lay.x(e, q)], 0.0), 1.0)) for q in range(lay.nq))
    y = tuple(float(max(values[lay.y(e, t)], 0.0)) for t in order)
    return FracPoint(x, y)


def _arc_reduced_costs(inst, lay, rc, e):
    order = inst.facility_order
    out = {("x", q): float(rc[lay.x(e, q)]) for q in range(lay.nq)}
    for pos, t in enumerate(order):
        out[("y", pos)] = float(rc[lay.y(e, t)])
    return out


def root_cut_loop(inst: NetworkInstance, settings: Optional[LoopSettings] = None) -> RootLoopReport:
    settings = settings or LoopSettings()
    lay = _Layout(inst)
    model = lp_relaxation(inst)
    sol = lp.solve(model)
    if sol.status is not lp.LpStatus.OPTIMAL:
        return RootLoopReport(status=sol.status.value, stop_reason="LP relaxation not optimal (round 0)")
    report = RootLoopReport(status="Optimal", z_lp=sol.objective, z_root=sol.objective,
                            trace=[sol.objective])
    sets = [arc_set(inst, e) for e in range(len(inst.arcs))]
    order = inst.facility_order
    for rnd in range(1, settings.max_rounds + 1):
        added = 0
        for e, aset in enumerate(sets):
            if aset is None:
                continue
            point = _arc_point(inst, lay, sol.values, e)
            out = separate(aset, point, _arc_reduced_costs(inst, lay, sol.reduced_costs, e),
                           order=settings.order, tolerance=settings.tolerance)
            if out.cut_dropped:
                report.cuts_dropped += 1
            if out.verdict is not Verdict.VIOLATED:
                continue
            cut = out.cut
            row = {lay.x(e, q): float(cut.alpha[q]) for q in range(lay.nq)}
            for pos, t in enumerate(order):
                row[lay.y(e, t)] = -float(cut.beta[pos])
            model.add_row(row, "<=", float(cut.gamma))
            report.cuts.append((e, rnd, cut))
            key = out.provenance.value
            report.cuts_added[key] = report.cuts_added.get(key, 0) + 1
            added += 1
        if added == 0:
            report.stop_reason = "no violated cuts"
            break
        report.rounds = rnd
        prev = sol.objective
        sol = lp.solve(model, sol.basis)
        if sol.status is not lp.LpStatus.OPTIMAL:
            report.status = sol.status.value
            report.stop_reason = f"LP {sol.status.value} after round {rnd}"
            return report
        report.trace.append(sol.objective)
        report.z_root = sol.objective
        if sol.objective - prev < settings.rel_improvement * max(abs(prev), 1e-9):
            report.stop_reason = "relative improvement below threshold"
            break
    else:
        report.stop_reason = "round limit"
    if settings.compute_upper_bound:
        report.z_ub = upper_bound(inst)
        report.gap_closed = gap_closed(report.z_lp, report.z_root, report.z_ub)
    return report


def _dijkstra(inst: NetworkInstance, src: int, dst: int, length) -> Optional[list[int]]:
    out = [[] for _ in range(inst.nodes)]
    for e, arc in enumerate(inst.arcs):
        out[arc.tail].append(e)
    dist = {src: 0.0}
    prev = {}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, float("inf")):
            continue
        if u == dst:
            break
        for e in out[u]:
            v = inst.arcs[e].head
            nd = d + length(e)
            if nd < dist.get(v, float("inf")) - 1e-12:
                dist[v] = nd
                prev[v] = e
                heapq.heappush(heap, (nd, v))
    if dst not in dist:
        return None
    path = []
    v = dst
    while v != src:
        e = prev[v]
        path.append(e)
        v = inst.arcs[e].tail
    return path[::-1]


def _arc_cover(inst: NetworkInstance, e: int, load: int) -> float:
    need = load - inst.arcs[e].existing
    if need <= 0:
        return 0.0
    costs = inst.arcs[e].install_costs
    if any(c <= 0 for c in costs):
        return 0.0
    caps = [c for c, _ in inst.facilities]
    return cover_cost(costs, caps, need)[0]


def _evaluate(inst: NetworkInstance, paths) -> float:
    loads = [0] * len(inst.arcs)
    total = 0.0
    for q, path in enumerate(paths):
        for e in path:
            loads[e] += inst.commodities[q].demand
            total += inst.commodities[q].routing_costs[e]
    return total + sum(_arc_cover(inst, e, loads[e]) for e in range(len(inst.arcs)))


def upper_bound(inst: NetworkInstance) -> Optional[float]:
    """Cost of a feasible integral design from two greedy routings (None if none exists)."""
    plain = []
    for q, k in enumerate(inst.commodities):
        path = _dijkstra(inst, k.source, k.sink, lambda e, q=q: inst.commodities[q].routing_costs[e])
        if path is None:
            return None
        plain.append(path)
    best = _evaluate(inst, plain)
    # incremental routing on marginal install cost given loads placed so far
    loads = [0] * len(inst.arcs)
    paths = [None] * len(inst.commodities)
    for q in sorted(range(len(inst.commodities)), key=lambda q: -inst.commodities[q].demand):
        k = inst.commodities[q]

        def marginal(e, k=k):
            return (k.routing_costs[e] + _arc_cover(inst, e, loads[e] + k.demand)
                    - _arc_cover(inst, e, loads[e]))
        path = _dijkstra(inst, k.source, k.sink, marginal)
        paths[q] = path
        for e in path:
            loads[e] += k.demand
    return min(best, _evaluate(inst, paths))


def verify_cuts(inst: NetworkInstance, report: RootLoopReport) -> bool:
    """Every cut in the report is valid for its arc's set (exact check)."""
    for e, _, cut in report.cuts:
        aset = arc_set(inst, e)
        value, _, _ = cut_maximum(cut.alpha, cut.beta, cut.gamma, aset.demands, aset.capacities,
                                  aset.existing)
        if value > 0:
            return False
    return True
