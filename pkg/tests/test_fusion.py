import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from shiftinv import fusion as fu
from shiftinv.exactnum import q_binomial, q_pochhammer
from shiftinv.vertexcore import PoleError, r_weight

qs = st.fractions(min_value=F(1, 20), max_value=F(19, 20), max_denominator=20)
zs = st.fractions(min_value=F(21, 20), max_value=5, max_denominator=20)


def unit(i, N):
    return tuple(1 if c == i else 0 for c in range(1, N + 1))


def transitions(L, M, N):
    for A in fu.compositions(M, N):
        for B in fu.compositions(L, N):
            for C in fu.compositions(M, N):
                D = tuple(a + b - c for a, b, c in zip(A, B, C))
                if min(D) >= 0 and sum(D) <= L:
                    yield A, B, C, D


@given(qs, zs)
def test_single_column_is_the_six_vertex_weight(q, z):
    if q * z == 1:
        return
    for a, b, c, d in itertools.product(range(3), repeat=4):
        A, C = unit(a, 2), unit(c, 2)
        assert fu.m_fused_closed(q, z, 1, A, b, C, d) == r_weight(q, z, a, b, c, d)


def test_empty_row_is_frozen():
    assert fu.m_fused_closed(F(1, 3), F(5, 2), 2, (0,), 0, (0,), 0) == 1
    assert fu.m_fused_bruteforce(F(1, 3), F(5, 2), 2, (0,), 0, (0,), 0) == 1


def test_two_vertex_row_bruteforce():
    q, z = F(1, 3), F(5, 2)
    # one path enters from below in the right slot, one from the left
    for c in ((0, 1), (1, 0), (1, 1), (0, 0)):
        for d in (0, 1):
            w = fu.row_vertex_weight(q, z, 2, (0, 1), 1, c, d)
            # direct product of the two vertex weights with the middle edge summed
            ref = sum(r_weight(q, q * z, 0, 1, c[0], h) * r_weight(q, z, 1, h, c[1], d) for h in (0, 1))
            assert w == ref


@given(qs, zs)
def test_fused_row_closed_vs_average(q, z):
    if any(q ** k * z == 1 for k in range(4)):
        return
    for M, N in ((2, 1), (2, 2), (3, 2)):
        for A in fu.compositions(M, N):
            tot = F(0)
            for b in range(N + 1):
                for C in fu.compositions(M, N):
                    for d in range(N + 1):
                        closed = fu.m_fused_closed(q, z, M, A, b, C, d)
                        assert closed == fu.m_fused_bruteforce(q, z, M, A, b, C, d)
                        if b == 0:
                            tot += closed
            assert tot == 1


def test_tower_of_one_equals_row_weight():
    q, z = F(2, 7), F(3, 2)
    assert fu.column_tower_weight(q, z, 2, (1,), [0], (0,), [1]) == fu.m_fused_closed(q, 1 / z, 2, (1,), 0, (0,), 1)


def test_column_stochasticity():
    q, z = F(1, 4), F(5, 3)
    for A in fu.compositions(2, 1):
        for b in range(2):
            tot = sum(fu.column_tower_weight(q, z, 2, A, [b], C, [d])
                      for C in fu.compositions(2, 1) for d in range(2))
            assert tot == 1


@pytest.mark.parametrize("L, M, N", [(1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2), (3, 2, 1), (2, 3, 1)])
def test_lm_closed_vs_bruteforce(L, M, N):
    rng = random.Random(L * 100 + M * 10 + N)
    q, z = F(rng.randint(1, 9), 10), F(rng.randint(11, 40), 10)
    for A, B, C, D in transitions(L, M, N):
        assert fu.lm_fused_closed(q, z, L, M, A, B, C, D) == fu.lm_fused_bruteforce(q, z, L, M, A, B, C, D)


def test_lm_with_one_row_is_the_row_weight_at_inverse():
    q, z = F(1, 3), F(7, 4)
    for A, B, C, D in transitions(1, 2, 2):
        b = B.index(1) + 1 if any(B) else 0
        d = D.index(1) + 1 if any(D) else 0
        assert fu.lm_fused_closed(q, z, 1, 2, A, B, C, D) == fu.m_fused_closed(q, 1 / z, 2, A, b, C, d)


@pytest.mark.parametrize("L, M, N", [(2, 2, 1), (2, 2, 2), (3, 1, 2)])
def test_bottom_recursion(L, M, N):
    q, z = F(2, 5), F(9, 4)
    for A, B, C, D in transitions(L, M, N):
        assert fu.bottom_recursion(q, z, L, M, A, B, C, D) == fu.lm_fused_closed(q, z, L, M, A, B, C, D)


def test_bottom_recursion_needs_two_rows():
    with pytest.raises(ValueError):
        fu.bottom_recursion(F(1, 2), 2, 1, 1, (0,), (0,), (0,), (0,))


@given(qs, st.fractions(F(1, 9), 3, max_denominator=9), st.fractions(F(1, 9), 3, max_denominator=9),
       st.tuples(st.integers(0, 2), st.integers(0, 2)))
def test_phi_function_special_cases(q, x, y, mu):
    try:
        diag = fu.phi_function(mu, mu, x, y, q)
        n = sum(mu)
        assert diag == q_pochhammer(x, q, n) * (y / x) ** n / q_pochhammer(y, q, n)
        zero = fu.phi_function((0, 0), mu, x, y, q)
        assert zero == q_pochhammer(y / x, q, n) / q_pochhammer(y, q, n)
    except PoleError:
        pass


def test_continued_weight_specializes():
    q, z = F(1, 3), F(5, 2)
    for A, B, C, D in transitions(2, 2, 2):
        assert fu.w_continued_m(q, z, 2, q ** -2, A, B, C, D) == fu.lm_fused_closed(q, z, 2, 2, A, B, C, D)
    assert fu.w_continued_m(q, z, 2, F(3, 7), (1, 0), (0, 1), (1, 1), (0, 1)) == 0


def test_continued_weight_stochastic_in_free_parameter():
    q, z, m = F(1, 3), F(5, 2), F(2, 9)
    for A in ((1, 0), (1, 1), (2, 1)):
        for B in fu.compositions(2, 2):
            tot = F(0)
            for D in fu.compositions(2, 2):
                C = tuple(a + b - d for a, b, d in zip(A, B, D))
                if min(C) >= 0:
                    tot += fu.w_continued_m(q, z, 2, m, A, B, C, D)
            assert tot == 1


def test_first_column():
    q, z = F(1, 4), F(1, 5)
    for L in (1, 2, 3):
        law = fu.first_column_law(q, z, L)
        assert law[0] == 1 / q_pochhammer(z, q, L)
        assert sum(law) == 1


def test_infinite_weight_sums_and_factorizes():
    q, l, m = F(1, 3), F(3, 5), F(1, 4)
    for A in itertools.product(range(3), repeat=3):
        if sum(A) > 5:
            continue
        tot = F(0)
        for D in itertools.product(*(range(a + 1) for a in A)):
            w = fu.w_infinite(q, l, m, A, (0, 0, 0), tuple(a - d for a, d in zip(A, D)), D)
            nd = sum(D)
            assert w == fu.split_D_marginal(q, l, m, sum(A), nd) * fu.split_D_conditional(q, A, nd, D)
            tot += w
        assert tot == 1


def test_infinite_weight_specializes():
    # l = q^{-L} recovers the column weight of the m-continued model
    q, m = F(1, 3), F(2, 7)
    for L in (1, 2, 3):
        for A in ((1, 1), (2, 0), (1, 2)):
            for D in itertools.product(*(range(a + 1) for a in A)):
                C = tuple(a - d for a, d in zip(A, D))
                assert fu.w_infinite(q, q ** -L, m, A, (0, 0), C, D) == fu.w_continued_columns(q, L, m, A, D)


def test_split_conditional_examples():
    q = F(2, 5)
    A = (2, 1, 1)
    for nD in range(5):
        tot = sum(fu.split_D_conditional(q, A, nD, D) for D in itertools.product(*(range(a + 1) for a in A)))
        assert tot == 1
    assert fu.split_D_conditional(q, A, 0, (0, 0, 0)) == 1


def test_incoming_law():
    q, z, l = 0.4, 0.3, 0.6
    law = fu.incoming_law(q, z, l)
    assert abs(sum(law) - 1) < 1e-10
    assert law[0] == pytest.approx(fu.incoming_prob(q, z, l, 0))
    ratios = [law[d + 1] / law[d] for d in range(len(law) - 1)]
    assert all(r < z / l + 1e-9 for r in ratios[5:])
    assert fu.incoming_prob(q, z, l, -1) == 0


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_miracle_sum_is_one(seed, N):
    rng = random.Random(seed)
    r = lambda: F(rng.randint(1, 60), rng.randint(7, 41))
    args = (r(), r(), r(), r(), [r() for _ in range(N)], [r() for _ in range(N)],
            [r() for _ in range(N)], [r() for _ in range(N)])
    try:
        assert fu.miracle_sum_exp(*args) == 1
    except (PoleError, ZeroDivisionError):
        pass


def test_miracle_sum_integer_points():
    q, z = F(1, 3), F(5, 2)
    assert fu.miracle_sum(q, z, 3, 3, (1, 1), (1, 1), (1, 1), (1, 1), (0, 0)) == 1
    with pytest.raises(fu.CompositionError):
        fu.miracle_sum(q, z, 2, 2, (1, 0), (1, 0), (0, 0), (0, 0), (0, 0))


def test_color_projection():
    q, z = F(1, 4), F(7, 3)
    for A, B in itertools.product(fu.compositions(2, 2), repeat=2):
        for Ct in fu.compositions(2, 1):
            assert fu.verify_color_projection(q, z, 2, 2, A, B, Ct, 1)
    # colors absent from A and B
    assert fu.verify_color_projection(q, z, 2, 2, (1, 0, 0), (0, 0, 0), (1, 0), 2)


@pytest.mark.parametrize("extent, L, Ms, zs, queries", [
    ((1, 1), 2, [2], [F(1, 5)], [(1, (1, 1))]),
    ((2, 2), 2, [1, 2], [F(1, 5), F(2, 7)], [(1, (1, 1)), (2, (2, 2)), (1, (2, 1))]),
    ((1, 1), 1, [1], [F(1, 5)], [(1, (1, 1))]),
])
def test_fused_equals_unfused_block(extent, L, Ms, zs, queries):
    assert fu.verify_fusion_theorem(extent, L, Ms, zs, F(1, 3), queries)


def test_fused_law_is_a_distribution():
    d = fu.fused_quadrant_joint_distribution(2, 2, 2, [1, 2], [F(1, 4), F(1, 5)], F(1, 3), [(1, (2, 2))])
    assert sum(d.values()) == 1 and all(v > 0 for v in d.values())
