import json

import pytest

from ufarcset import lp
from ufarcset.arcset import format_cut
from ufarcset.netdesign import (PROFILES, NetworkInstance, RootLoopReport, gap_closed, generate,
                                lp_relaxation, root_cut_loop, upper_bound, verify_cuts)


def single_arc(demands, facilities, routing=0.0, existing=0):
    return NetworkInstance.from_dict({
        "nodes": 2,
        "arcs": [{"tail": 0, "head": 1, "existing": existing}],
        "facilities": [{"capacity": c, "cost": p} for c, p in facilities],
        "commodities": [{"source": 0, "sink": 1, "demand": d, "routing_costs": routing} for d in demands],
    })


def test_profiles():
    assert len(PROFILES) == 27
    assert PROFILES["2_1_1"] == ((130, 50), (10000, 5000))
    assert PROFILES["1_3_1"] == ((200,), (10000,))
    assert PROFILES["3_1_1"] == ((130, 50, 20), (10000, 5000, 2500))


def test_generate_deterministic():
    a = generate(7, 12, 5, "3_1_1")
    b = generate(7, 12, 5, "3_1_1")
    assert a.to_json() == b.to_json()
    assert len(a.arcs) == 36
    assert all(10 <= k.demand <= 190 for k in a.commodities)
    assert NetworkInstance.from_dict(json.loads(a.to_json())).to_json() == a.to_json()


def test_lp_single_arc():
    inst = single_arc([10], [(130, 10000)])
    sol = lp.solve(lp_relaxation(inst))
    assert sol.objective == pytest.approx(10000 * 10 / 130)


def test_lp_existing_capacity_routing_only():
    inst = NetworkInstance.from_dict({
        "nodes": 3,
        "arcs": [{"tail": 0, "head": 1, "existing": 100}, {"tail": 1, "head": 2, "existing": 100},
                 {"tail": 0, "head": 2, "existing": 100}],
        "facilities": [{"capacity": 50, "cost": 1000}],
        "commodities": [{"source": 0, "sink": 2, "demand": 30, "routing_costs": [1, 1, 5]}],
    })
    assert lp.solve(lp_relaxation(inst)).objective == pytest.approx(2)


def test_lp_unreachable_sink():
    inst = NetworkInstance.from_dict({
        "nodes": 3, "arcs": [{"tail": 0, "head": 1}],
        "facilities": [{"capacity": 50, "cost": 1000}],
        "commodities": [{"source": 0, "sink": 2, "demand": 30}],
    })
    assert lp.solve(lp_relaxation(inst)).status is lp.LpStatus.INFEASIBLE
    assert root_cut_loop(inst).status == "Infeasible"


def test_gap_closed():
    assert gap_closed(100, 200, 200) == 100
    assert gap_closed(100, 100, 200) == 0
    assert gap_closed(100, 150, 200) == 50
    assert gap_closed(100, 100, 100) is None


def test_upper_bound_examples():
    assert upper_bound(single_arc([10], [(130, 10000)])) == 10000
    assert upper_bound(single_arc([10, 20], [(130, 0)], routing=3.0)) == 6


def test_embedded_single_arc_first_cut():
    inst = single_arc([11, 15, 24, 50], [(100, 1000)])
    rep = root_cut_loop(inst)
    # LP point puts every x at 1, so the arc separation is settled by rounding
    assert rep.z_lp == pytest.approx(1000)
    assert rep.rounds == 0


def test_integral_lp_has_no_rounds():
    inst = single_arc([10], [(10, 100)])
    rep = root_cut_loop(inst)
    assert rep.rounds == 0 and rep.gap_closed is None


def test_generated_loop_properties():
    inst = generate(42, 12, 5, "3_1_1")
    rep = root_cut_loop(inst)
    assert rep.z_root > rep.z_lp
    assert rep.z_lp <= rep.z_root <= rep.z_ub + 1e-6
    assert all(b >= a - 1e-7 for a, b in zip(rep.trace, rep.trace[1:]))
    assert verify_cuts(inst, rep)
    back = RootLoopReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back.to_dict() == rep.to_dict()
    assert json.dumps(root_cut_loop(inst).to_dict()) == json.dumps(rep.to_dict())
