import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shiftinv import vertexcore as vc
from shiftinv.vertexcore import (PoleError, check_merge, check_reflection, check_split_at_one,
                                 check_stochasticity, check_unitarity, check_yang_baxter,
                                 merge_color, outcomes, r_weight, unitarity_sides,
                                 yang_baxter_sides)

qs = st.fractions(min_value=Fraction(1, 40), max_value=Fraction(39, 40), max_denominator=40)
zs = st.fractions(min_value=Fraction(1, 30), max_value=5, max_denominator=30).filter(lambda z: z != 1)
colors = st.integers(0, 3)


def table_weight(q, z, i, j, k, l):
    # hand-written six-vertex table: a, b1, b2, c1, c2 in the stochastic gauge
    d = 1 - q * z
    if (i, j) == (k, l) == (i, i):
        return Fraction(1)
    if i == j:
        return Fraction(0)
    if (k, l) == (i, j):
        return (1 - z) / d if i < j else q * (1 - z) / d
    if (k, l) == (j, i):
        return (1 - q) * z / d if i < j else (1 - q) / d
    return Fraction(0)


def test_spec_example_weight():
    assert r_weight(Fraction(1, 2), Fraction(1, 3), 1, 0, 1, 0) == Fraction(2, 5)


@given(qs, zs, colors, colors, colors, colors)
def test_weight_matches_table(q, z, i, j, k, l):
    if q * z == 1:
        return
    assert r_weight(q, z, i, j, k, l) == table_weight(q, z, i, j, k, l)


def test_pole_raises():
    with pytest.raises(PoleError):
        r_weight(Fraction(1, 2), 2, 1, 0, 1, 0)


@given(qs, zs, colors, colors)
def test_stochastic_rows(q, z, i, j):
    if q * z == 1:
        return
    assert check_stochasticity(q, z, i, j, 3)
    assert set((k, l) for k, l in itertools.product(range(4), repeat=2)
               if r_weight(q, z, i, j, k, l)) <= set(outcomes(i, j))


def test_stochasticity_two_term_example():
    q, z = Fraction(1, 2), Fraction(1, 3)
    assert r_weight(q, z, 0, 1, 1, 0) + r_weight(q, z, 0, 1, 0, 1) == 1
    assert check_stochasticity(q, z, 0, 0, 1)


@given(qs, colors, colors, colors, colors)
def test_split_at_one(q, i, j, k, l):
    assert check_split_at_one(q, i, j, k, l)


@given(qs, zs, colors, colors, colors, colors)
def test_reflection(q, z, i, j, k, l):
    if q * z == 1:
        return
    assert check_reflection(q, z, i, j, k, l, 3)


def test_reflection_b_type_n1():
    q, z = Fraction(1, 3), Fraction(2, 5)
    assert r_weight(q, z, 1, 0, 1, 0) == r_weight(q, z, 1, 0, 1, 0)
    assert check_reflection(q, z, 0, 1, 0, 1, 1)


@given(qs, zs, st.integers(1, 3), colors, colors)
def test_merge(q, z, cutoff, i, j):
    if q * z == 1:
        return
    assert check_merge(q, z, cutoff, i, j, 3)


def test_merge_examples():
    q, z = Fraction(2, 7), Fraction(3, 4)
    assert check_merge(q, z, 1, 2, 0, 2)
    assert merge_color(0, 2) == 0 and merge_color(3, 2) == 2


def _ybe_dense(q, x, y, z, N):
    # three nested sums over internal edges, using the hand table
    cols = range(N + 1)
    W = lambda s, *c: table_weight(q, s, *c)
    bad = []
    for a0, b0, c0, a3, b3, c3 in itertools.product(cols, repeat=6):
        lhs = sum(W(y / x, b0, a0, b1, a1) * W(z / x, c0, a1, c1, a3) * W(z / y, c1, b1, c3, b3)
                  for a1, b1, c1 in itertools.product(cols, repeat=3))
        rhs = sum(W(z / y, c0, b0, c1, b1) * W(z / x, c1, a0, c3, a1) * W(y / x, b1, a1, b3, a3)
                  for a1, b1, c1 in itertools.product(cols, repeat=3))
        if lhs != rhs:
            bad.append((a0, b0, c0, a3, b3, c3))
    return bad


def test_ybe_spec_example_and_dense_oracle():
    q, x, y, z = Fraction(1, 2), 3, 5, 7
    assert check_yang_baxter(q, x, y, z, 1)
    assert _ybe_dense(q, Fraction(x), Fraction(y), Fraction(z), 1) == []
    sides = list(yang_baxter_sides(q, x, y, z, 1))
    assert len(sides) == 64


def test_ybe_dense_and_sparse_agree_n2():
    q, x, y, z = Fraction(1, 5), Fraction(7, 3), Fraction(1, 4), Fraction(9, 2)
    dense = {}
    for ext, l, r in yang_baxter_sides(q, x, y, z, 2):
        dense[ext] = (l, r)
        assert l == r
    assert len(dense) == 3 ** 6
    assert _ybe_dense(q, x, y, z, 2) == []


def test_ybe_with_split_vertex():
    assert check_yang_baxter(Fraction(1, 3), 2, 2, 9, 2)


@given(qs, zs, zs, zs)
def test_ybe_random_n2(q, x, y, z):
    try:
        assert check_yang_baxter(q, x, y, z, 2)
    except PoleError:
        pass


def test_ybe_detects_broken_weight(monkeypatch):
    orig = vc.r_weight

    def broken(q, z, i, j, k, l):
        w = orig(q, z, i, j, k, l)
        return w * Fraction(11, 10) if (i, j, k, l) == (2, 1, 2, 1) else w

    monkeypatch.setattr(vc, "r_weight", broken)
    assert not check_yang_baxter(Fraction(1, 2), 3, 5, 7, 2)


def test_unitarity_examples():
    assert check_unitarity(Fraction(1, 2), 3, 5, 1)
    assert len(list(unitarity_sides(Fraction(1, 2), 3, 5, 1))) == 16
    assert check_unitarity(Fraction(2, 7), 4, 9, 2)
    assert check_unitarity(Fraction(2, 7), 4, 4, 3)


@given(qs, zs, zs)
def test_unitarity_random(q, x, y):
    try:
        assert check_unitarity(q, x, y, 3)
    except PoleError:
        pass
