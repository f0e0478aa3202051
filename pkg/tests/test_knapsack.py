import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ufarcset.knapsack import (KnapsackQuery, KnapsackTables, brute_force_max, cover_cost,
                               cut_maximum, maximize, strengthen, w_of_capacity)

A4 = (11, 15, 24, 50)


def test_cover_cost_examples():
    assert cover_cost([1], [60], 0) == (0.0, [0])
    assert cover_cost([1], [60], -5) == (0.0, [0])
    assert cover_cost([1], [60], 61) == (2.0, [2])
    assert cover_cost([1, 1], [50, 130], 100) == (1.0, [0, 1])


def test_maximize_examples():
    ans = maximize(KnapsackQuery((1, 0, 1, 0), (1,), 0, A4, (60,), 0))
    assert ans.value == 1
    assert (ans.x + ans.y) in [(1, 0, 1, 0, 1), (1, 1, 1, 0, 1)]
    ans = maximize(KnapsackQuery((0, 0, 0, 0), (1,), 0, A4, (60,), 10))
    assert ans.value == 0 and ans.x == (0, 0, 0, 0) and ans.y == (0,)
    ans = maximize(KnapsackQuery((1, 1, 1, 1), (1,), 0, A4, (60,), 0))
    assert ans.value == 2
    x, y = ans.x, ans.y
    assert sum(x) - y[0] == 2
    assert sum(a * v for a, v in zip(A4, x)) <= 60 * y[0]


def test_w_of_capacity_examples():
    assert w_of_capacity((0, 0, 1), (1,), (11, 15, 24), (60,), -50) == -1
    assert w_of_capacity((1, 0, 1, 0), (1,), A4, (60,), 0) == 1
    assert w_of_capacity((2, 1, 3), (1,), (5, 6, 7), (4,), 18) == 6


def test_strengthen_examples():
    assert strengthen(A4, (60,), 0, (1, 0, 1, 0), (1,)) == ((1, 1, 1, 0), (1,))
    assert strengthen(A4, (60,), 0, (1, 1, 1, 1), (2,)) == ((1, 1, 1, 1), (2,))
    assert strengthen(A4, (60,), 0, (0, 0, 0, 0), (2,)) == ((1, 1, 1, 1), (2,))


def test_rational_values_exact():
    ans = maximize(KnapsackQuery((Fraction(1, 3),) * 4, (Fraction(1),), Fraction(0), A4, (90,), 0))
    assert isinstance(ans.value, Fraction) and ans.value == 0


def test_cut_maximum_sign_patterns():
    assert cut_maximum((1, 1), (-1,), 0, (3, 4), (5,), 0)[0] == float("inf")
    value, x, y = cut_maximum((1, -1), (0,), 0, (3, 4), (5,), 0)
    assert value == 1 and x == (1, 0)


instances = st.tuples(
    st.lists(st.integers(1, 40), min_size=1, max_size=6),
    st.lists(st.integers(5, 60), min_size=1, max_size=3),
    st.integers(-30, 30))


@settings(max_examples=120, deadline=None)
@given(instances, st.data())
def test_maximize_matches_brute_force(inst, data):
    a, b, c = inst
    b = sorted(b)
    alpha = data.draw(st.lists(st.integers(-3, 6), min_size=len(a), max_size=len(a)))
    beta = data.draw(st.lists(st.integers(1, 6), min_size=len(b), max_size=len(b)))
    gamma = data.draw(st.integers(-5, 5))
    ans = maximize(KnapsackQuery(tuple(alpha), tuple(beta), gamma, tuple(a), tuple(b), c))
    ref, _ = brute_force_max(alpha, beta, gamma, a, b, c)
    assert ans.value == ref
    load = sum(ai * v for ai, v in zip(a, ans.x))
    assert load <= sum(bi * v for bi, v in zip(b, ans.y)) + c
    assert sum(al * v for al, v in zip(alpha, ans.x)) - sum(be * v for be, v in zip(beta, ans.y)) - gamma == ans.value


@settings(max_examples=80, deadline=None)
@given(instances, st.data())
def test_strengthen_dominates(inst, data):
    a, b, c = inst
    b = sorted(b)
    x = data.draw(st.lists(st.integers(0, 1), min_size=len(a), max_size=len(a)))
    load = sum(ai * v for ai, v in zip(a, x)) - c
    y = [0] * len(b)
    if load > 0:
        y[0] = -(-load // b[0])
    x2, y2 = strengthen(a, b, c, x, y)
    assert all(u >= v for u, v in zip(x2, x))
    assert sum(ai * v for ai, v in zip(a, x2)) <= sum(bi * v for bi, v in zip(b, y2)) + c
    alpha = data.draw(st.lists(st.integers(0, 5), min_size=len(a), max_size=len(a)))
    assert sum(p * v for p, v in zip(alpha, x2)) >= sum(p * v for p, v in zip(alpha, x))


@settings(max_examples=60, deadline=None)
@given(instances, st.data())
def test_w_nondecreasing(inst, data):
    a, b, c = inst
    alpha = data.draw(st.lists(st.integers(-2, 5), min_size=len(a), max_size=len(a)))
    beta = data.draw(st.lists(st.integers(1, 5), min_size=len(b), max_size=len(b)))
    tab = KnapsackTables(alpha, beta, a, sorted(b))
    values = [tab.w(C) for C in range(-60, 60, 7)]
    assert all(u <= v for u, v in zip(values, values[1:]))
