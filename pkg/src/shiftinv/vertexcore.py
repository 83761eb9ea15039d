"""The stochastic colored R-vertex and its local identities.

A vertex is addressed by its four edge colors in the order
(bottom i, left j, top k, right l). Colors live in {0..N}; 0 means empty.
The spectral parameter z is the ratio (column rapidity) / (row rapidity).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable

from .exactnum import as_rational


class PoleError(ZeroDivisionError):
    """Raised when a weight denominator vanishes (q z = 1 and friends)."""


def r_weight(q, z, i: int, j: int, k: int, l: int) -> Fraction:
    """Stochastic weight R_z(i, j; k, l)."""
    q, z = as_rational(q), as_rational(z)
    den = 1 - q * z
    if den == 0:
        raise PoleError(f"1 - q z vanishes at q={q}, z={z}")
    if i == j:
        return Fraction(1) if (k == i and l == i) else Fraction(0)
    if i < j:
        # larger color enters from the left
        if k == i and l == j:
            return (1 - z) / den
        if k == j and l == i:
            return (1 - q) * z / den
        return Fraction(0)
    # larger color enters from the bottom
    if k == i and l == j:
        return q * (1 - z) / den
    if k == j and l == i:
        return (1 - q) / den
    return Fraction(0)


def outcomes(i: int, j: int) -> list[tuple[int, int]]:
    """Possible (top, right) outputs for inputs (bottom i, left j)."""
    if i == j:
        return [(i, i)]
    return [(i, j), (j, i)]


def _colors(N: int) -> range:
    return range(N + 1)


def check_stochasticity(q, z, i: int, j: int, N: int) -> bool:
    total = sum(r_weight(q, z, i, j, k, l) for k in _colors(N) for l in _colors(N))
    return total == 1


def check_split_at_one(q, i: int, j: int, k: int, l: int) -> bool:
    return r_weight(q, 1, i, j, k, l) == (1 if (i == l and j == k) else 0)


def check_reflection(q, z, i: int, j: int, k: int, l: int, N: int) -> bool:
    return r_weight(q, z, i, j, k, l) == r_weight(q, z, N - j, N - i, N - l, N - k)


def _require_no_pole(q, *zs) -> None:
    for z in zs:
        if 1 - q * z == 0:
            raise PoleError(f"1 - q z vanishes at q={q}, z={z}")


def _weight_table(q, z, cols) -> dict:
    """Nonzero weights keyed by incoming (bottom, left), as lists of (top, right, w)."""
    table = {}
    for i, j in itertools.product(cols, repeat=2):
        table[i, j] = [(k, l, w) for k, l in itertools.product(cols, repeat=2)
                       if (w := r_weight(q, z, i, j, k, l))]
    return table


def yang_baxter_sides(q, x, y, z, N: int):
    """Yield (externals, lhs, rhs) for every assignment of the 6 external colors.

    Three lines a, b, c with rapidities x, y, z and increasing steepness. At
    each crossing the shallower line plays the horizontal role, so the a-b,
    a-c and b-c crossings carry spectral parameters y/x, z/x and z/y. The two
    sides differ by moving the a-b crossing from the left of c to its right.
    Both sides are pushed forward from each input triple through tabulated
    weights; outputs never reached carry weight zero.
    """
    q, x, y, z = (as_rational(v) for v in (q, x, y, z))
    _require_no_pole(q, y / x, z / x, z / y)
    cols = list(_colors(N))
    ab, ac, bc = (_weight_table(q, s, cols) for s in (y / x, z / x, z / y))
    zero = Fraction(0)
    for a_in, b_in, c_in in itertools.product(cols, repeat=3):
        lhs: dict = {}
        rhs: dict = {}
        # LHS: a and b cross left of c, so c then meets a (now lower) and b
        for b_mid, a_mid, w1 in ab[b_in, a_in]:
            for c_mid, a_out, w2 in ac[c_in, a_mid]:
                for c_out, b_out, w3 in bc[c_mid, b_mid]:
                    key = (a_out, b_out, c_out)
                    lhs[key] = lhs.get(key, zero) + w1 * w2 * w3
        # RHS: c meets b (lower on this side) then a; a and b cross right of c
        for c_mid, b_mid, w1 in bc[c_in, b_in]:
            for c_out, a_mid, w2 in ac[c_mid, a_in]:
                for b_out, a_out, w3 in ab[b_mid, a_mid]:
                    key = (a_out, b_out, c_out)
                    rhs[key] = rhs.get(key, zero) + w1 * w2 * w3
        for out in itertools.product(cols, repeat=3):
            yield (a_in, b_in, c_in) + out, lhs.get(out, zero), rhs.get(out, zero)


def unitarity_sides(q, x, y, N: int):
    """Yield (externals, value, expected) for two successive a-b crossings.

    The first crossing has b vertical (parameter y/x), the second a vertical
    (parameter x/y); together they must act as the identity.
    """
    q, x, y = (as_rational(v) for v in (q, x, y))
    _require_no_pole(q, y / x, x / y)
    cols = list(_colors(N))
    for a_in, b_in, a_out, b_out in itertools.product(cols, repeat=4):
        total = Fraction(0)
        for a_mid, b_mid in itertools.product(cols, repeat=2):
            w1 = r_weight(q, y / x, b_in, a_in, b_mid, a_mid)
            if w1:
                total += w1 * r_weight(q, x / y, a_mid, b_mid, a_out, b_out)
        expected = Fraction(1 if (a_in == a_out and b_in == b_out) else 0)
        yield (a_in, b_in, a_out, b_out), total, expected


def check_yang_baxter(q, x, y, z, N: int) -> bool:
    return all(lhs == rhs for _, lhs, rhs in yang_baxter_sides(q, x, y, z, N))


def check_unitarity(q, x, y, N: int) -> bool:
    return all(v == e for _, v, e in unitarity_sides(q, x, y, N))


def merge_color(c: int, cutoff: int) -> int:
    """Projection [c]_C for the contiguous block C = {cutoff..N}."""
    return cutoff if c >= cutoff else c


def check_merge(q, z, cutoff: int, i: int, j: int, N: int) -> bool:
    """Color-merging identities for the block C = {cutoff..N} at inputs (i, j).

    Summing the top color over C (right color fixed outside C) gives the
    merged-model weight with top color ``cutoff``; likewise for the right
    color; summing both over C gives 1 exactly when both inputs lie in C.
    """
    block = range(cutoff, N + 1)
    outside = [c for c in _colors(N) if c < cutoff]
    mi, mj = merge_color(i, cutoff), merge_color(j, cutoff)
    for l in outside:
        lhs = sum((r_weight(q, z, i, j, k, l) for k in block), Fraction(0))
        if lhs != r_weight(q, z, mi, mj, cutoff, l):
            return False
    for k in outside:
        lhs = sum((r_weight(q, z, i, j, k, l) for l in block), Fraction(0))
        if lhs != r_weight(q, z, mi, mj, k, cutoff):
            return False
    both = sum((r_weight(q, z, i, j, k, l) for k in block for l in block), Fraction(0))
    if both != r_weight(q, z, mi, mj, cutoff, cutoff):
        return False
    return both == (1 if (i >= cutoff and j >= cutoff) else 0)
