"""Exact rational scalars and q-combinatorial primitives.

Rationals are plain :class:`fractions.Fraction` values. Every identity check in
the package evaluates both sides at rational parameter points and compares the
results with ``==``.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are rejected because they would silently break exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def random_rational(rng: random.Random, lo: Fraction | int = 0, hi: Fraction | int = 1,
                    max_den: int = 1000, avoid: Iterable = ()) -> Fraction:
    """Random rational strictly inside (lo, hi) with denominator <= max_den."""
    lo, hi = Fraction(lo), Fraction(hi)
    banned = {Fraction(a) for a in avoid}
    while True:
        den = rng.randint(2, max_den)
        a = math.floor(lo * den) + 1
        b = math.ceil(hi * den) - 1
        if a > b:
            continue
        value = Fraction(rng.randint(a, b), den)
        if lo < value < hi and value not in banned:
            return value


def q_pochhammer(x, q, n: int) -> Fraction:
    """(x;q)_n = (1-x)(1-xq)...(1-xq^{n-1}); n = 0 gives 1."""
    if n < 0:
        raise ValueError("q_pochhammer needs n >= 0")
    x, q = as_rational(x), as_rational(q)
    out = Fraction(1)
    term = x
    for _ in range(n):
        out *= 1 - term
        term *= q
    return out


def q_pochhammer_inf(x: float, q: float, tol: float = 1e-12) -> float:
    """Numerical (x;q)_infinity for |q| < 1.

    The product is cut at the first K with |x| q^K / ((1-q)(1-|x|q^K)) below
    ``tol``, which bounds the log of the omitted tail.
    """
    x, q = float(x), float(q)
    if not abs(q) < 1:
        raise ValueError("q_pochhammer_inf needs |q| < 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    aq = abs(q)
    out = 1.0
    term = x
    k = 0
    while True:
        tail = abs(term)
        if tail < 1 and tail / ((1 - aq) * (1 - tail)) < tol:
            break
        out *= 1.0 - term
        term *= q
        k += 1
        if k > 10_000_000:
            raise ArithmeticError("q_pochhammer_inf failed to converge")
    return out


def q_pochhammer_inf_terms(x: float, q: float, tol: float = 1e-12) -> int:
    """Truncation index used by :func:`q_pochhammer_inf`."""
    aq = abs(q)
    term = abs(float(x))
    k = 0
    while not (term < 1 and term / ((1 - aq) * (1 - term)) < tol):
        term *= aq
        k += 1
    return k


def q_binomial(a: int, b: int, q) -> Fraction:
    """Gaussian binomial (q;q)_a / ((q;q)_b (q;q)_{a-b}); 0 outside 0 <= b <= a."""
    if b < 0 or a < 0 or b > a:
        return Fraction(0)
    q = as_rational(q)
    b = min(b, a - b)
    # product form avoids dividing by zero at roots of unity such as q = 1
    num = Fraction(1)
    den = Fraction(1)
    for i in range(b):
        num *= 1 - q ** (a - i)
        den *= 1 - q ** (i + 1)
    if den == 0:
        return Fraction(math.comb(a, b)) if q == 1 else _q_binomial_by_recursion(a, b, q)
    return num / den


def _q_binomial_by_recursion(a: int, b: int, q: Fraction) -> Fraction:
    # Pascal rule C(a,b) = C(a-1,b-1) + q^b C(a-1,b); safe at any q
    row = [Fraction(1)]
    for n in range(1, a + 1):
        new = [Fraction(0)] * (n + 1)
        for k in range(n + 1):
            left = row[k - 1] if k >= 1 else Fraction(0)
            right = row[k] if k < n else Fraction(0)
            new[k] = left + q ** k * right
        row = new
    return row[b]


def q_multinomial(M: int, A: Sequence[int], q) -> Fraction:
    """(q;q)_M / ((q;q)_{A_0} (q;q)_{A_1} ... (q;q)_{A_N}) with A_0 = M - |A|."""
    if any(a < 0 for a in A):
        raise ValueError("composition entries must be nonnegative")
    rest = M - sum(A)
    if rest < 0:
        raise ValueError(f"composition of size {sum(A)} exceeds capacity {M}")
    out = Fraction(1)
    left = M
    for part in list(A) + [rest]:
        out *= q_binomial(left, part, q)
        left -= part
    return out


def inversion_count(word: Sequence[int]) -> int:
    """Number of pairs i < j with word[i] > word[j]."""
    return sum(1 for i, j in itertools.combinations(range(len(word)), 2) if word[i] > word[j])


def words_with_content(M: int, A: Sequence[int]):
    """All words of length M over {0..N} with A_i letters equal to i (i >= 1)."""
    rest = M - sum(A)
    if rest < 0:
        return
    letters = [0] * rest
    for color, count in enumerate(A, start=1):
        letters += [color] * count
    yield from sorted(set(itertools.permutations(letters)))


def content(word: Sequence[int], N: int) -> tuple[int, ...]:
    """Composition (A_1, ..., A_N) counting each positive color in ``word``."""
    counts = [0] * N
    for c in word:
        if c:
            counts[c - 1] += 1
    return tuple(counts)
