import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from shiftinv import walkcov as wc
from shiftinv.latticepf import PreconditionError
from shiftinv.vertexcore import r_weight

probs = st.fractions(min_value=F(1, 12), max_value=F(11, 12), max_denominator=12)


def test_table_readout():
    p = wc.WalkParams(F(1, 3), F(1, 2))
    got = [wc.homogeneous_vertex_weight(p, 0, 1, 0, 1), wc.homogeneous_vertex_weight(p, 0, 1, 1, 0),
           wc.homogeneous_vertex_weight(p, 1, 0, 1, 0), wc.homogeneous_vertex_weight(p, 1, 0, 0, 1)]
    assert got == [F(1, 3), F(2, 3), F(1, 2), F(1, 2)]
    assert p.q == F(3, 2)


@given(probs, probs)
def test_walk_weights_are_the_vertex_weights(b1, b2):
    if b1 == b2:
        return
    p = wc.WalkParams(b1, b2)
    for c in itertools.product(range(3), repeat=4):
        assert wc.homogeneous_vertex_weight(p, *c) == r_weight(p.q, p.z, *c)
    for h in "HV":
        assert wc.walk_step_weight(p, h, "H") + wc.walk_step_weight(p, h, "V") == 1


def test_params_validated():
    with pytest.raises(ValueError):
        wc.WalkParams(F(1), F(1, 2))


@given(probs, probs, st.integers(0, 4), st.integers(0, 4))
def test_riemann_two_routes(b1, b2, X, Y):
    p = wc.WalkParams(b1, b2)
    assert wc.riemann_function(p, X, Y, 0, 0) == wc.riemann_function_vertical(p, X, Y, 0, 0)


def test_riemann_contour_cross_check():
    p = wc.WalkParams(F(1, 3), F(3, 5))
    for X, Y in [(0, 0), (1, 2), (3, 3), (4, 1)]:
        assert abs(float(wc.riemann_function(p, X, Y, 0, 0)) - wc.riemann_contour(p, X, Y)) < 1e-9
    assert wc.riemann_function(p, 1, 1, 2, 0) == 0


def test_intersection_dp_vs_enumeration_3x3():
    p = wc.WalkParams(F(2, 5), F(3, 7))
    A, B, C, D = (0, 0), (3, 3), (1, -1), (2, 4)
    for varpi in ["any", ("HV", "VV"), ("HH", "VH")]:
        for h in itertools.product("HV", repeat=4):
            kw = dict(zip(("a_in", "b_out", "c_in", "d_out"), h))
            dp = wc.intersection_distribution(p, A, B, C, D, varpi, **kw)
            assert dp == wc.intersection_distribution_bruteforce(p, A, B, C, D, varpi, **kw)
            assert sum(dp.values()) == 1


def test_degenerate_walks():
    p = wc.WalkParams(F(1, 2), F(1, 3))
    d = wc.intersection_distribution(p, (1, 1), (1, 1), (1, 1), (1, 1))
    assert d == {1: 1}
    with pytest.raises(wc.GeometryError):
        wc.intersection_distribution(p, (2, 0), (1, 1), (0, 0), (1, 1))


def test_intersection_shift_4x4():
    p = wc.WalkParams(F(1, 4), F(3, 5))
    A, B, C, D = (0, 0), (4, 4), (1, -1), (2, 5)
    for varpi in list(wc.INTERSECTION_TYPES) + ["any"]:
        assert wc.verify_intersection_shift(p, A, B, C, D, (1, 0), varpi)
        assert wc.verify_intersection_shift(p, A, B, C, D, (0, 0), varpi)


def test_intersection_extended_headings():
    p = wc.WalkParams(F(1, 4), F(3, 5))
    # horizontal entry at C and exit at D, strictly outside the box
    kw = dict(a_in="V", b_out="V", c_in="H", d_out="H")
    assert wc.verify_intersection_shift(p, (0, 0), (4, 2), (1, -1), (2, 3), (1, 0), ("HV", "VH"), **kw)


def test_vertical_entry_needs_strict_offset():
    assert wc.crossing_geometry((0, 0), (3, 3), (0, -1), (2, 4), a_in="V") is not None
    p = wc.WalkParams(F(1, 4), F(3, 5))
    with pytest.raises(PreconditionError):
        wc.verify_intersection_shift(p, (0, 0), (3, 3), (0, -1), (2, 4), (1, 0), "any", a_in="V")


def test_rd_sum_shift_and_counterexample():
    p = wc.WalkParams(F(1, 3), F(3, 5))
    assert wc.verify_rd_sum_shift(p, (0, 0), (4, 3), (1, -1), (2, 4), (1, 0))
    assert wc.verify_rd_sum_shift(p, (0, 0), (4, 3), (1, -1), (2, 4), (0, 0))
    # intersecting but not crossing: the sums really differ
    A, B, C, D = (0, 0), (4, 0), (2, 0), (7, 3)
    assert wc.intersecting_position(A, B, C, D)
    assert not wc.verify_rd_sum_shift(p, A, B, C, D, (1, 0), require_crossing=False)
    with pytest.raises(PreconditionError):
        wc.verify_rd_sum_shift(p, A, B, C, D, (1, 0))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_four_point_all_inputs(N):
    rng = random.Random(N)
    for b1, b2 in [(F(1, 3), F(1, 2)), (F(3, 4), F(1, 5))]:
        for bottom, left in itertools.product(range(N + 1), repeat=2):
            base = [0] + sorted((rng.randint(0, 3) for _ in range(N)), reverse=True)
            assert wc.four_point_vertex_check(b1, b2, N, bottom, left, base)


def test_pde_trivial_delta_and_random():
    b1, b2 = F(1, 3), F(2, 5)
    zero = [0] * 5
    assert wc.iterate_four_point_pde(b1, b2, zero, zero, None, 4, 4) == 0
    assert wc.solve_four_point_pde(b1, b2, zero, zero, None, 4, 4) == 0
    # a unit source at (a, b) returns the Riemann function itself
    src = {(2, 3): 1}
    val = wc.iterate_four_point_pde(b1, b2, zero, zero, src, 4, 4)
    assert val == wc.solve_four_point_pde(b1, b2, zero, zero, src, 4, 4)
    assert val == wc.riemann_function(wc.WalkParams(b1, b2), 4, 4, 2, 3)
    rng = random.Random(2)
    chi = [F(rng.randint(-9, 9), 7) for _ in range(5)]
    psi = [chi[0]] + [F(rng.randint(-9, 9), 7) for _ in range(4)]
    u = {(a, b): F(rng.randint(-9, 9), 5) for a in range(1, 5) for b in range(1, 5)}
    assert wc.iterate_four_point_pde(b1, b2, chi, psi, u, 4, 4) == wc.solve_four_point_pde(b1, b2, chi, psi, u, 4, 4)
    with pytest.raises(ValueError):
        wc.iterate_four_point_pde(b1, b2, [1, 0], [0, 0], None, 1, 1)


def test_second_moments_shift():
    b1, b2 = F(1, 3), F(3, 5)
    # rows bottom to top: colors 1, 1, 2, 2, 1 on a 3 by 3 truncation
    cols = [1, 1, 2, 2, 1]
    assert wc.verify_second_moment_shift(b1, b2, cols, 1, 2, 3, 2, 1, 3)
    m = wc.height_moments(b1, b2, cols, 1, 2, 3, 2, 3)
    assert m["Ei"] > 0 and m["Eii"] >= m["Ei"] ** 2


def test_second_moments_equal_cutoffs_reduce_to_marginals():
    b1, b2 = F(1, 4), F(2, 3)
    m = wc.height_moments(b1, b2, [1, 2, 2], 1, 2, 2, 2, 2)
    assert m["Ej"] <= m["Ei"]


def test_second_moments_need_room_below():
    with pytest.raises(PreconditionError):
        wc.verify_second_moment_shift(F(1, 3), F(3, 5), [2, 1, 1, 1], 1, 2, 3, 1, 1, 2)
