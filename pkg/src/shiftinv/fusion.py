"""Fused vertex weights and their analytic continuations.

Compositions are tuples (A_1, ..., A_N) of path counts per positive color;
the count of color 0 is derived as capacity - |A| and never stored.

Argument order for every vertex weight is (bottom A, left B; top C, right D).
A weight W_{L,M}(z) with a single horizontal line (L = 1) is the M-fused
vertex with spectral parameter 1/z, so the closed-form parameter z is the
reciprocal of the six-vertex ratio column / row rapidity.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from .exactnum import (as_rational, inversion_count, q_binomial,
                       q_multinomial, q_pochhammer, q_pochhammer_inf, words_with_content)
from .vertexcore import PoleError, outcomes, r_weight


class CompositionError(ValueError):
    pass


def _tup(A) -> tuple:
    A = tuple(int(a) for a in A)
    if any(a < 0 for a in A):
        raise CompositionError(f"negative entry in composition {A}")
    return A


def _unit(i: int, N: int) -> tuple:
    """e_i as a length-N composition; e_0 is the zero vector."""
    return tuple(1 if j == i - 1 else 0 for j in range(N))


def _add(*vs) -> tuple:
    return tuple(sum(col) for col in zip(*vs))


def _sub(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def compositions(total_max: int, N: int):
    """All compositions of length N with |A| <= total_max."""
    for A in itertools.product(range(total_max + 1), repeat=N):
        if sum(A) <= total_max:
            yield A


def _check_capacity(A, cap: int, name: str) -> None:
    if sum(A) > cap:
        raise CompositionError(f"|{name}| = {sum(A)} exceeds capacity {cap}")


def _nonzero(value, what: str) -> None:
    if value == 0:
        raise PoleError(f"vanishing denominator: {what}")


# row vertices and M-fusion

def row_vertex_weight(q, z, M: int, a: Sequence[int], b: int, c: Sequence[int], d: int) -> Fraction:
    """M fundamental vertices side by side with spectral points q^{M-i} z.

    ``a`` and ``c`` are the bottom and top color words read left to right.
    """
    q, z = as_rational(q), as_rational(z)
    if len(a) != M or len(c) != M:
        raise CompositionError("words must have length M")
    left = {b: Fraction(1)}
    for i in range(M):
        s = q ** (M - 1 - i) * z
        nxt: dict = {}
        for h, w in left.items():
            for k, l in outcomes(a[i], h):
                if k != c[i]:
                    continue
                rw = r_weight(q, s, a[i], h, k, l)
                if rw:
                    nxt[l] = nxt.get(l, Fraction(0)) + w * rw
        left = nxt
    return left.get(d, Fraction(0))


def m_fused_bruteforce(q, z, M: int, A, b: int, C, d: int) -> Fraction:
    """q-exchangeable average of row vertices over words with contents A and C."""
    q = as_rational(q)
    A, C = _tup(A), _tup(C)
    _check_capacity(A, M, "A")
    _check_capacity(C, M, "C")
    total = Fraction(0)
    tops = list(words_with_content(M, C))
    for a in words_with_content(M, A):
        wa = q ** inversion_count(a)
        for c in tops:
            total += wa * row_vertex_weight(q, z, M, a, b, c, d)
    return total / q_multinomial(M, A, q)


def m_fused_closed(q, z, M: int, A, b: int, C, d: int) -> Fraction:
    q, z = as_rational(q), as_rational(z)
    A, C = _tup(A), _tup(C)
    N = len(A)
    _check_capacity(A, M, "A")
    _check_capacity(C, M, "C")
    den = 1 - q ** M * z
    _nonzero(den, "1 - q^M z")
    if _add(A, _unit(b, N)) != _add(C, _unit(d, N)):
        return Fraction(0)
    a_d = M - sum(A) if d == 0 else A[d - 1]
    tail = q ** sum(A[d:])
    if b == d:
        return (1 - q ** a_d * z) / den * tail
    if b < d:
        return (1 - q ** a_d) / den * tail
    return z * (1 - q ** a_d) / den * tail


# (L, M)-fusion

def column_tower_weight(q, z, M: int, A, bs: Sequence[int], C, ds: Sequence[int]) -> Fraction:
    """L stacked M-fused vertices; the i-th from the bottom has spectral 1/(q^{i-1} z)."""
    q, z = as_rational(q), as_rational(z)
    N = len(A)
    cur = {_tup(A): Fraction(1)}
    for i, (b, d) in enumerate(zip(bs, ds)):
        s = 1 / (q ** i * z)
        nxt: dict = {}
        for comp, w in cur.items():
            out = _sub(_add(comp, _unit(b, N)), _unit(d, N))
            if min(out, default=0) < 0 or sum(out) > M:
                continue
            v = m_fused_closed(q, s, M, comp, b, out, d)
            if v:
                nxt[out] = nxt.get(out, Fraction(0)) + w * v
        cur = nxt
    return cur.get(_tup(C), Fraction(0))


def lm_fused_bruteforce(q, z, L: int, M: int, A, B, C, D) -> Fraction:
    """Average of column towers over left words, weighted by q^{inv} of the reversed word."""
    q, z = as_rational(q), as_rational(z)
    A, B, C, D = (_tup(v) for v in (A, B, C, D))
    for v, cap, name in ((A, M, "A"), (C, M, "C"), (B, L, "B"), (D, L, "D")):
        _check_capacity(v, cap, name)
    N = len(A)
    total = Fraction(0)
    rights = list(words_with_content(L, D))
    for bs in words_with_content(L, B):
        wb = q ** inversion_count(tuple(reversed(bs)))
        for ds in rights:
            total += wb * column_tower_weight(q, z, M, A, bs, C, ds)
    return total / q_multinomial(L, B, q)


def bottom_recursion(q, z, L: int, M: int, A, B, C, D, shift=None) -> Fraction:
    """Right side of the peel-off-the-bottom recursion for W_{L,M}.

    The remaining L-1 rows are evaluated at ``shift * z`` (default q z).
    """
    q, z = as_rational(q), as_rational(z)
    shift = q if shift is None else as_rational(shift)
    A, B, C, D = (_tup(v) for v in (A, B, C, D))
    N = len(A)
    if L < 2:
        raise ValueError("the recursion needs L >= 2")
    B0 = L - sum(B)
    total = Fraction(0)
    for i in range(N + 1):
        bi = B0 if i == 0 else B[i - 1]
        if bi == 0:
            continue
        Bm = _sub(B, _unit(i, N))
        pref = (1 - q ** bi) * q ** sum(B[i:])
        for j in range(N + 1):
            Dm = _sub(D, _unit(j, N))
            if min(Dm, default=0) < 0 or sum(Dm) > L - 1:
                continue
            Aij = _sub(_add(A, _unit(i, N)), _unit(j, N))
            if min(Aij, default=0) < 0 or sum(Aij) > M:
                continue
            w1 = m_fused_closed(q, 1 / z, M, A, i, Aij, j)
            if w1:
                total += pref * w1 * lm_fused_closed(q, shift * z, L - 1, M, Aij, Bm, C, Dm)
    return total / (1 - q ** L)


def phi_function(lam, mu, x, y, q) -> Fraction:
    """The two-composition hypergeometric factor used by the closed fused weight."""
    q, x, y = as_rational(q), as_rational(x), as_rational(y)
    lam, mu = _tup(lam), _tup(mu)
    if any(l > m for l, m in zip(lam, mu)):
        raise CompositionError("phi_function needs lam <= mu componentwise")
    N = len(lam)
    nl, nm = sum(lam), sum(mu)
    den = q_pochhammer(y, q, nm)
    _nonzero(den, "(y;q)_|mu|")
    diff = _sub(mu, lam)
    expo = sum(diff[i] * lam[j] for i in range(N) for j in range(i + 1, N))
    out = q ** expo * q_pochhammer(x, q, nl) * q_pochhammer(y / x, q, nm - nl) / den
    if nl:
        out *= (y / x) ** nl
    for l, m in zip(lam, mu):
        out *= q_binomial(m, l, q)
    return out


def _continued_sum(q, z, L: int, A, B, C, D, x1, y1) -> Fraction:
    total = Fraction(0)
    for P in itertools.product(*(range(min(b, c) + 1) for b, c in zip(B, C))):
        CP = _sub(C, P)
        CDP = _sub(_add(C, D), P)
        total += (phi_function(CP, CDP, x1, y1, q)
                  * phi_function(P, B, q ** (-L) / z, q ** (-L), q))
    return total


def lm_fused_closed(q, z, L: int, M: int, A, B, C, D) -> Fraction:
    q, z = as_rational(q), as_rational(z)
    A, B, C, D = (_tup(v) for v in (A, B, C, D))
    for v, cap, name in ((A, M, "A"), (C, M, "C"), (B, L, "B"), (D, L, "D")):
        _check_capacity(v, cap, name)
    if _add(A, B) != _add(C, D):
        return Fraction(0)
    pre = z ** (sum(D) - sum(B)) * q ** (sum(A) * L - sum(D) * M)
    return pre * _continued_sum(q, z, L, A, B, C, D, q ** (L - M) * z, q ** (-M) * z)


def w_continued_m(q, z, L: int, m, A, B, C, D) -> Fraction:
    """Closed fused weight with q^{-M} replaced by a free parameter m."""
    q, z, m = as_rational(q), as_rational(z), as_rational(m)
    A, B, C, D = (_tup(v) for v in (A, B, C, D))
    _check_capacity(B, L, "B")
    _check_capacity(D, L, "D")
    if _add(A, B) != _add(C, D):
        return Fraction(0)
    pre = z ** (sum(D) - sum(B)) * q ** (sum(A) * L) * m ** sum(D)
    return pre * _continued_sum(q, z, L, A, B, C, D, m * q ** L * z, m * z)


def first_column_weight(q, z, L: int, A, d: int) -> Fraction:
    """Limit mass of d top-color paths leaving the boundary column to the right.

    The column is fed by L paths of the top color N = len(A) from the left;
    every other right composition has limit mass 0. The infinite Pochhammer
    ratio is the finite product 1/(z;q)_L.
    """
    q, z = as_rational(q), as_rational(z)
    _tup(A)
    if not 0 <= d <= L:
        return Fraction(0)
    den = q_pochhammer(z, q, L) * q_pochhammer(q, q, d)
    _nonzero(den, "(z;q)_L (q;q)_d")
    return q_pochhammer(q ** (-L), q, d) * (z * q ** L) ** d / den


def first_column_law(q, z, L: int) -> list[Fraction]:
    """Masses of d = 0..L for the number of paths leaving the boundary column."""
    q, z = as_rational(q), as_rational(z)
    return [first_column_weight(q, z, L, (0,), d) for d in range(L + 1)]


def w_infinite(q, l, m, A, B, C, D) -> Fraction:
    """Fully continued vertex: paths from the left go up, paths from below may turn."""
    q, l, m = as_rational(q), as_rational(l), as_rational(m)
    A, B, C, D = (_tup(v) for v in (A, B, C, D))
    if _add(A, B) != _add(C, D):
        return Fraction(0)
    if any(d > a for d, a in zip(D, A)):
        return Fraction(0)
    den = q_pochhammer(m, q, sum(A))
    _nonzero(den, "(m;q)_|A|")
    N = len(A)
    nd = sum(D)
    expo = sum(D[i] * (A[j] - D[j]) for i in range(N) for j in range(i + 1, N))
    out = (m / l) ** nd * q_pochhammer(m / l, q, sum(A) - nd) * q_pochhammer(l, q, nd) / den
    out *= q ** expo
    for a, d in zip(A, D):
        out *= q_binomial(a, a - d, q)
    return out


def w_continued_columns(q, L: int, m, A, D) -> Fraction:
    """Bulk column weight of the m-continued model at z = 1 (left paths all go up)."""
    q, m = as_rational(q), as_rational(m)
    A, D = _tup(A), _tup(D)
    if any(d > a for d, a in zip(D, A)):
        return Fraction(0)
    N = len(A)
    nd = sum(D)
    den = q_pochhammer(m, q, sum(A))
    _nonzero(den, "(m;q)_|A|")
    expo = sum(D[i] * (A[j] - D[j]) for i in range(N) for j in range(i + 1, N))
    out = m ** nd * q ** (L * nd) * q_pochhammer(m * q ** L, q, sum(A) - nd)
    out *= q_pochhammer(q ** (-L), q, nd) / den * q ** expo
    for a, d in zip(A, D):
        out *= q_binomial(a, a - d, q)
    return out


def incoming_prob(q, z, l, d: int, tol: float = 1e-14) -> float:
    """Law of the number of paths entering a row of the continued model."""
    q, z, l = float(q), float(z), float(l)
    if d < 0:
        return 0.0
    head = q_pochhammer_inf(z / l, q, tol) / q_pochhammer_inf(z, q, tol)
    ratio = 1.0
    for i in range(d):
        ratio *= (1 - l * q ** i) / (1 - q ** (i + 1)) * (z / l)
    return head * ratio


def incoming_law(q, z, l, mass: float = 1 - 1e-12, max_terms: int = 100_000) -> list[float]:
    """Masses for d = 0, 1, ... truncated once the cumulative mass reaches ``mass``."""
    q, z, l = float(q), float(z), float(l)
    p = incoming_prob(q, z, l, 0)
    out = [p]
    total = p
    d = 0
    while total < mass:
        p *= (1 - l * q ** d) / (1 - q ** (d + 1)) * (z / l)
        d += 1
        out.append(p)
        total += p
        if d > max_terms:
            raise ArithmeticError("incoming law tail too heavy to truncate")
    return out


def split_D_marginal(q, l, m, nA: int, nD: int) -> Fraction:
    """Law of the number of paths turning right out of nA incoming from below."""
    q, l, m = as_rational(q), as_rational(l), as_rational(m)
    if not 0 <= nD <= nA:
        return Fraction(0)
    den = q_pochhammer(m, q, nA)
    _nonzero(den, "(m;q)_|A|")
    return ((m / l) ** nD * q_pochhammer(m / l, q, nA - nD) * q_pochhammer(l, q, nD) / den
            * q_binomial(nA, nD, q))


def split_D_conditional(q, A, nD: int, D) -> Fraction:
    """Law of the color split D given its total nD."""
    q = as_rational(q)
    A, D = _tup(A), _tup(D)
    if sum(D) != nD or any(d > a for d, a in zip(D, A)):
        return Fraction(0)
    N = len(A)
    expo = sum(D[i] * (A[j] - D[j]) for i in range(N) for j in range(i + 1, N))
    out = q ** expo / q_binomial(sum(A), nD, q)
    for a, d in zip(A, D):
        out *= q_binomial(a, d, q)
    return out


# the summation identity behind the closed-form proof, over exponentials

def _rho(a: int, lam, mu, x, y, q) -> Fraction:
    """rho_a where lam and mu are given as lists of q-powers q^{lam_i}, q^{mu_i}."""
    _nonzero(x - y, "x - y")
    shared = (1 - y) / (x - y)
    if a == 0:
        ql, qm = _prod(lam), _prod(mu)
        _nonzero(1 - y * qm, "1 - y q^|mu|")
        return (x * ql - y * qm) / (1 - y * qm) * shared
    _nonzero(1 - mu[a - 1], "1 - q^{mu_a}")
    return x * _prod(lam[:a]) * (1 - mu[a - 1] / lam[a - 1]) / (1 - mu[a - 1]) * shared


def _prod(vals) -> Fraction:
    out = Fraction(1)
    for v in vals:
        out *= v
    return out


def miracle_sum_exp(q, z, qM, qL, qA, qB, qD, qP) -> Fraction:
    """Evaluate the double sum with every exponent supplied as its q-power.

    qA = (q^{A_1}, ..., q^{A_N}) and likewise for B, D, P; qM = q^M and
    qL = q^L. C is fixed by conservation, q^{C_i} = q^{A_i} q^{B_i} / q^{D_i}.
    The identity says the result is 1 for arbitrary values.
    """
    q, z, qM, qL = (as_rational(v) for v in (q, z, qM, qL))
    qA, qB, qD, qP = ([as_rational(v) for v in vec] for vec in (qA, qB, qD, qP))
    N = len(qA)
    qC = [a * b / d for a, b, d in zip(qA, qB, qD)]
    qA0 = qM / _prod(qA)
    qB0 = qL / _prod(qB)
    zi = 1 / z
    _nonzero(1 - qL, "1 - q^L")
    den_l = 1 - qM * zi
    _nonzero(den_l, "1 - q^M / z")
    pref = 1 / (_prod(qC) * (1 - qL))
    # P, B pair and C-P, C+D-P pair as q-powers
    lam1, mu1 = qP, qB
    lam2 = [c / p for c, p in zip(qC, qP)]
    mu2 = [c * d / p for c, d, p in zip(qC, qD, qP)]
    x1, y1 = 1 / (qL * z), 1 / qL
    x2, y2 = qL / qM * z, z / qM
    total = Fraction(0)
    for a in range(N + 1):
        ta = 1 if a else 0
        # (1 - q^{B_a}) rho_a(P, B) with the common factor cancelled, so integer
        # points with B_a = 0 or |B| = L stay finite
        _nonzero(x1 - y1, "x - y")
        shared = (1 - y1) / (x1 - y1)
        if a == 0:
            r1 = -qB0 * (x1 * _prod(lam1) - y1 * _prod(mu1)) * shared
        else:
            r1 = x1 * _prod(lam1[:a]) * (1 - mu1[a - 1] / lam1[a - 1]) * shared
        for b in range(N + 1):
            tb = 1 if b else 0
            # M-fused weight L_{1/z}(A, a; A + e_a - e_b, b) through q^{A_b}
            qAb = qA0 if b == 0 else qA[b - 1]
            tail = _prod(qA[b:])
            if a == b:
                lw = (1 - qAb * zi) / den_l * tail
            elif a < b:
                lw = (1 - qAb) / den_l * tail
            else:
                lw = zi * (1 - qAb) / den_l * tail
            s = (pref * z ** (ta - tb) * qM ** tb * qL ** (ta - tb)
                 * _prod(qB[a:]) * lw
                 * r1 * _rho(b, lam2, mu2, x2, y2, q))
            total += s
    return total


def miracle_sum(q, z, L: int, M: int, A, B, C, D, P) -> Fraction:
    """Integer-exponent wrapper; C must satisfy A + B = C + D."""
    q = as_rational(q)
    A, B, C, D = (_tup(v) for v in (A, B, C, D))
    if _add(A, B) != _add(C, D):
        raise CompositionError("miracle_sum needs A + B = C + D")
    pw = lambda vec: [q ** v for v in vec]
    return miracle_sum_exp(q, z, q ** M, q ** L, pw(A), pw(B), pw(D), pw(P))


# color projection

def verify_color_projection(q, z, L: int, M: int, A, B, C_merged, i: int) -> bool:
    """Merge colors i and i+1 and compare summed weights with the merged weight."""
    A, B, Ct = _tup(A), _tup(B), _tup(C_merged)
    N = len(A)
    if not 1 <= i < N:
        raise ValueError("need 1 <= i < N")

    def merge(v):
        return v[:i - 1] + (v[i - 1] + v[i],) + v[i + 1:]

    At, Bt = merge(A), merge(B)
    if len(Ct) != N - 1:
        raise CompositionError("merged target has length N - 1")
    if sum(Ct) > M:
        return True
    Dt = _sub(_add(At, Bt), Ct)
    if min(Dt, default=0) < 0 or sum(Dt) > L:
        # no admissible right composition on either side
        return True
    lhs = Fraction(0)
    tot = Ct[i - 1]
    for ci in range(tot + 1):
        C = Ct[:i - 1] + (ci, tot - ci) + Ct[i:]
        D = _sub(_add(A, B), C)
        if min(D) < 0 or sum(D) > L:
            continue
        lhs += lm_fused_closed(q, z, L, M, A, B, C, D)
    return lhs == lm_fused_closed(q, z, L, M, At, Bt, Ct, Dt)


# quadrant models

def fused_quadrant_joint_distribution(X: int, Y: int, L: int, Ms: Sequence[int], zs: Sequence, q,
                                      queries: Sequence[tuple[int, tuple[int, int]]],
                                      invert_z: bool = True) -> dict:
    """Exact law of fused heights H^{>=m}(x, y) in the quadrant with columns 0..X-1.

    Row y (1-indexed) receives L paths of color y from the left. The query
    (m, (x, y)) counts paths of color >= m crossing the vertical line left of
    column x below row y + 1/2. Column x uses M = Ms[x] and the closed weight
    evaluated at 1/zs[x] (``invert_z``), which is the convention under which
    the fused column equals the block of unfused columns with rapidities
    zs[x], q zs[x], ... and rows 1, q, ..., q^{L-1}.
    """
    q = as_rational(q)
    zs = [as_rational(v) for v in zs]
    N = Y
    by_col: dict = {}
    for idx, (m, (a, b)) in enumerate(queries):
        if not (0 <= a <= X and 0 <= b <= Y):
            raise ValueError(f"query point {(a, b)} outside the simulated extent")
        by_col.setdefault(a, []).append((idx, m, b))
    n = len(queries)

    def record(rows, rec, a):
        rec = list(rec)
        for idx, m, b in by_col.get(a, []):
            rec[idx] = sum(sum(r[m - 1:]) if m >= 1 else sum(r) for r in rows[:b])
        return tuple(rec)

    start = tuple(tuple(L if c == y else 0 for c in range(1, N + 1)) for y in range(1, Y + 1))
    states = {(start, record(start, (None,) * n, 0)): Fraction(1)}
    empty = (0,) * N
    for a in range(X):
        M = Ms[a]
        w_arg = 1 / zs[a] if invert_z else zs[a]
        layer: dict = {}
        for (rows, rec), w in states.items():
            partial = {(rows, empty): w}
            for r in range(Y):
                nxt: dict = {}
                for (rs, up), pw in partial.items():
                    B = rs[r]
                    for D in compositions(L, N):
                        C = _sub(_add(up, B), D)
                        if min(C) < 0 or sum(C) > M:
                            continue
                        v = lm_fused_closed(q, w_arg, L, M, up, B, C, D)
                        if v == 0:
                            continue
                        key = (rs[:r] + (D,) + rs[r + 1:], C)
                        nxt[key] = nxt.get(key, Fraction(0)) + pw * v
                partial = nxt
            for (rs, _top), pw in partial.items():
                key = (rs, record(rs, rec, a + 1))
                layer[key] = layer.get(key, Fraction(0)) + pw
        states = layer
    dist: dict = {}
    for (_, rec), w in states.items():
        dist[rec] = dist.get(rec, Fraction(0)) + w
    return {k: v for k, v in dist.items() if v != 0}


def unfused_block_distribution(X: int, Y: int, L: int, Ms: Sequence[int], zs: Sequence, q,
                               queries: Sequence[tuple[int, tuple[int, int]]]) -> dict:
    """The same heights read off the unfused six-vertex model with geometric rapidity blocks."""
    from .latticepf import quadrant_joint_distribution

    q = as_rational(q)
    rows = [q ** (i % L) for i in range(Y * L)]
    cols = [as_rational(z) * q ** j for z, M in zip(zs[:X], Ms[:X]) for j in range(M)]
    left = [y for y in range(1, Y + 1) for _ in range(L)]
    offsets = [sum(Ms[:x]) for x in range(X + 1)]
    mapped = [(m, (offsets[a], L * b)) for m, (a, b) in queries]
    return quadrant_joint_distribution(offsets[X], Y * L, rows, cols, q, mapped, left_colors=left)


def verify_fusion_theorem(extent: tuple[int, int], L: int, Ms: Sequence[int], zs: Sequence, q,
                          queries: Sequence[tuple[int, tuple[int, int]]],
                          invert_z: bool = True) -> bool:
    """Fused heights at (x, y) against unfused heights at (M_0+...+M_{x-1}, L y)."""
    X, Y = extent
    fused = fused_quadrant_joint_distribution(X, Y, L, Ms, zs, q, queries, invert_z)
    return fused == unfused_block_distribution(X, Y, L, Ms, zs, q, queries)
