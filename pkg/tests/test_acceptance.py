"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import time
from fractions import Fraction

import numpy as np
import pytest

from corpus import (closed_form_instance, interior_point, random_hull_point, random_instance,
                    random_lp_point)
from ufarcset import oracle, rowgen
from ufarcset.arcset import ArcSetInstance, CutInequality, FracPoint, Provenance, Verdict, format_cut
from ufarcset.closed_form import CaseId, cut_for, detect
from ufarcset.knapsack import cut_maximum
from ufarcset.netdesign import PROFILES, generate, root_cut_loop, verify_cuts
from ufarcset.refine import Rejected, scale
from ufarcset.separator import separate

A4 = (11, 15, 24, 50)


def knapsack_max(cut, inst):
    return cut_maximum(cut.alpha, cut.beta, cut.gamma, inst.demands, inst.capacities, inst.existing)[0]


def reduced_instance(inst, reduced):
    return ArcSetInstance(tuple(inst.demands[q] for q in reduced["free_x"]),
                          tuple(inst.capacities[t] for t in reduced["free_y"]), reduced["cbar"])


def test_1_worked_examples(acceptance):
    problems = []
    cases = [
        (ArcSetInstance(A4, (100,), 0), FracPoint((0.3, 0.5, 0.9, 0.1), (0.38,)), {},
         "x3 <= y", Provenance.CLOSED_FORM_P5, 0.52),
        (ArcSetInstance(A4, (90,), 0), FracPoint((0.4, 0.5, 0.4, 0.4), (0.47,)), {},
         "1/3 x1 + 1/3 x2 + 1/3 x3 + 1/3 x4 <= y", Provenance.CLOSED_FORM_P6, 17 / 30 - 0.47),
        (ArcSetInstance(A4, (60,), 0), FracPoint((0.9, 0.5, 0.7, 0.1), (0.7,)),
         {"seed_points": [((1, 1, 1, 1), (2,))]}, "x1 + x4 <= y", Provenance.ROW_GENERATION, 0.3),
    ]
    slowest = 0.0
    for inst, point, kw, text, prov, viol in cases:
        t0 = time.perf_counter()
        out = separate(inst, point, **kw)
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        if format_cut(out.cut) != text or out.provenance is not prov:
            problems.append(f"{text}: got {format_cut(out.cut)} ({out.provenance})")
        if abs(out.violation - viol) > 1e-9:
            problems.append(f"{text}: violation {out.violation} != {viol}")
        if elapsed >= 1.0:
            problems.append(f"{text}: {elapsed:.2f}s")
    third = separate(*cases[2][:2], **cases[2][2])
    trace = [r["lp_value"] for r in third.details["trace"]]
    if len(trace) != 2 or abs(trace[0] - 0.9) > 1e-9 or abs(trace[1] - 0.3) > 1e-9:
        problems.append(f"capacity-60 trace {trace}")
    ok = acceptance(1, not problems, f"3 examples, slowest {slowest:.3f}s" + (f"; {problems}" if problems else ""))
    assert ok


def test_2_closed_form_matches_exact(acceptance):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    compared = 0
    mismatches = []
    kinds = [(k, nt) for k in ("small", "sandwich") for nt in (1, 2, 3)]
    while compared < 600:
        kind, nt = kinds[compared % len(kinds)]
        inst = closed_form_instance(rng, kind, nt)
        point = interior_point(rng, inst)
        case = detect(inst, point)
        if not case.applicable or case.case is CaseId.MEMBER:
            continue
        cut = cut_for(case, inst)
        value = float(cut.violation(point)) / float(cut.beta[0])
        exact = oracle.full_separation(inst, point).value
        worst = max(worst, abs(value - exact))
        if abs(value - exact) > 1e-7:
            mismatches.append((inst, point, value, exact))
        compared += 1
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60
    acceptance(2, ok, f"{compared} instances, {len(mismatches)} mismatches, max |diff| {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_3_every_cut_valid(acceptance):
    rng = np.random.default_rng(3)
    checked = invalid = 0
    t0 = time.perf_counter()
    i = 0
    while checked < 2400:
        inst = random_instance(rng, max_q=8, max_t=3, max_demand=120, cap_range=(20, 200),
                               c_range=(-80, 40))
        if i % 2:
            point = random_lp_point(rng, inst, p_fix=0.3)
        else:
            point = random_lp_point(rng, inst, p_fix=0.0)
        i += 1
        out = separate(inst, point, use_closed_form=bool(i % 3))
        if out.verdict is not Verdict.VIOLATED:
            continue
        checked += 1
        if knapsack_max(out.cut, inst) > 0:
            invalid += 1
        base = out.details.get("lift_base")
        if base is not None:
            checked += 1
            rinst = reduced_instance(inst, out.details["reduced"])
            if knapsack_max(CutInequality.from_dict(base), rinst) > 0:
                invalid += 1
    elapsed = time.perf_counter() - t0
    ok = invalid == 0
    acceptance(3, ok, f"{checked} cuts (pre- and post-lift) checked exactly, {invalid} invalid, {elapsed:.1f}s")
    assert ok


def test_4_facets(acceptance):
    rng = np.random.default_rng(4)
    unfixed = unfixed_facets = 0
    lifted = lifted_facets = 0
    while unfixed < 300 or lifted < 200:
        inst = random_instance(rng, max_q=5, max_t=2)
        fix = unfixed >= 300 or (lifted < 200 and rng.random() < 0.5)
        point = random_lp_point(rng, inst, p_fix=0.4 if fix else 0.0)
        out = separate(inst, point, use_closed_form=False)
        if out.verdict is not Verdict.VIOLATED or out.provenance is not Provenance.ROW_GENERATION:
            continue
        if inst.dim != oracle.affine_rank(oracle.catalogue(inst)):
            continue
        is_facet = oracle.facet_rank(inst, out.cut) == inst.dim
        if out.details["lift_steps"] or out.details["reduced"]["fixed"]["y_zero"]:
            if lifted < 200:
                lifted += 1
                lifted_facets += is_facet
        elif unfixed < 300:
            unfixed += 1
            unfixed_facets += is_facet
    ok = unfixed_facets == unfixed
    acceptance(4, ok, f"unfixed row-generation facets {unfixed_facets}/{unfixed}; "
                      f"lifted facet rate {lifted_facets}/{lifted} = {lifted_facets / lifted:.1%} (reported only)")
    assert ok


def test_5_membership_agreement(acceptance):
    rng = np.random.default_rng(5)
    disagreements = []
    inside = outside = 0
    for i in range(1200):
        inst = random_instance(rng, max_q=5, max_t=2)
        point = random_hull_point(rng, inst) if i % 2 else random_lp_point(rng, inst)
        member = oracle.membership(inst, point).member
        out = separate(inst, point)
        inside += member
        outside += not member
        if member != (out.verdict is Verdict.MEMBER):
            disagreements.append((inst, point, out.verdict, out.cut_dropped))
    ok = not disagreements
    acceptance(5, ok, f"{inside + outside} points ({inside} in P, {outside} outside), "
                      f"{len(disagreements)} disagreements")
    assert ok, disagreements[:3]


def test_6_strengthening_effect(acceptance):
    inst = ArcSetInstance(A4, (60,), 0)
    point = FracPoint((0.9, 0.5, 0.7, 0.1), (0.7,))
    seed = [((1, 1, 1, 1), (2,))]
    ex_with = rowgen.run(inst, point, seed_points=seed).lp_solves
    ex_without = rowgen.run(inst, point, seed_points=seed, use_strengthening=False).lp_solves
    rng = np.random.default_rng(6)
    with_s, without = [], []
    while len(with_s) < 200:
        inst = random_instance(rng, max_q=6, max_t=2, max_demand=100)
        point = random_lp_point(rng, inst, p_fix=0.0)
        if any(v <= 0 for v in point.y):
            continue
        with_s.append(rowgen.run(inst, point).lp_solves)
        without.append(rowgen.run(inst, point, use_strengthening=False).lp_solves)
    m_with, m_without = float(np.mean(with_s)), float(np.mean(without))
    ok = ex_with < ex_without and m_with <= m_without
    acceptance(6, ok, f"capacity-60 example {ex_with} vs {ex_without} LP solves; "
                      f"200-instance mean {m_with:.2f} with vs {m_without:.2f} without")
    assert ok


def test_7_root_loop(acceptance):
    problems = []
    positive = 0
    t0 = time.perf_counter()
    for i, name in enumerate(sorted(PROFILES)):
        inst = generate(1000 + i, 12, 5, name)
        rep = root_cut_loop(inst)
        if rep.status != "Optimal":
            problems.append(f"{name}: {rep.status}")
            continue
        if not (rep.z_lp <= rep.z_root + 1e-7 and rep.z_root <= rep.z_ub + 1e-7):
            problems.append(f"{name}: bounds {rep.z_lp} {rep.z_root} {rep.z_ub}")
        if any(b < a - 1e-7 for a, b in zip(rep.trace, rep.trace[1:])):
            problems.append(f"{name}: trace not monotone")
        if rep.rounds > 50:
            problems.append(f"{name}: {rep.rounds} rounds")
        if not verify_cuts(inst, rep):
            problems.append(f"{name}: invalid cut")
        positive += rep.gap_closed is not None and rep.gap_closed > 0
    if positive < 20:
        problems.append(f"gap closed > 0 on only {positive}")
    elapsed = time.perf_counter() - t0
    ok = not problems
    acceptance(7, ok, f"27 profiles, gap closed > 0 on {positive}/27, {elapsed:.1f}s"
                      + (f"; {problems}" if problems else ""))
    assert ok


def test_8_scaling(acceptance):
    integral = CutInequality([1, 0, 2, 1], [3], 0, integralized=True)
    scaled, mu = scale(integral)
    identity = (mu == 1 and list(scaled.alpha) == [1, 0, 2, 1] and list(scaled.beta) == [3]
                and scaled.gamma == 0)
    third = CutInequality([1 / 3] * 4, [1.0], 0.0)
    scaled3, mu3 = scale(third)
    thirds = mu3 == 3 and list(scaled3.alpha) == [1] * 4 and list(scaled3.beta) == [3]
    rejected = isinstance(scale(CutInequality([1.0, 1 / 10 ** 4], [1.0], 0.0)), Rejected)
    ok = identity and thirds and rejected
    acceptance(8, ok, f"integral identity {identity}, thirds to mu=3 {thirds}, 1e-4 coefficient rejected {rejected}")
    assert ok
