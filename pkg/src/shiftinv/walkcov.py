"""Persistent random walks, the discrete Riemann function and the covariance match.

Everything here lives in the homogeneous model with parameters b1, b2 in
(0, 1): a path entering a vertex from the left goes straight with probability
b1, a path entering from below goes straight with probability b2, and
q = b2 / b1. Lattice vertices are integer points; a walk is described by the
heading with which it enters each vertex, "H" (from the left) or "V" (from
below).

Height functions use the corner notation of :mod:`shiftinv.latticepf`: the
integer point (a, b) stands for the dual vertex (a + 1/2, b + 1/2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .exactnum import as_rational
from .latticepf import PreconditionError, quadrant_joint_distribution

H, V = "H", "V"
PASSAGES = ("HH", "HV", "VH", "VV")
INTERSECTION_TYPES = tuple(itertools.product(PASSAGES, PASSAGES))


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class WalkParams:
    b1: Fraction
    b2: Fraction

    def __post_init__(self):
        b1, b2 = as_rational(self.b1), as_rational(self.b2)
        if not (0 < b1 < 1 and 0 < b2 < 1):
            raise ValueError("b1 and b2 must lie in (0, 1)")
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)

    @property
    def q(self) -> Fraction:
        return self.b2 / self.b1

    @property
    def z(self) -> Fraction:
        """Spectral parameter of the equivalent fundamental vertex."""
        return (1 - self.b1) / (1 - self.b2)


def _params(p) -> WalkParams:
    if isinstance(p, WalkParams):
        return p
    return WalkParams(*p)


def walk_step_weight(p, in_heading: str, out_heading: str) -> Fraction:
    p = _params(p)
    if in_heading == H:
        return p.b1 if out_heading == H else 1 - p.b1
    if in_heading == V:
        return p.b2 if out_heading == V else 1 - p.b2
    raise ValueError(f"unknown heading {in_heading!r}")


def homogeneous_vertex_weight(p, i: int, j: int, k: int, l: int) -> Fraction:
    """Colored vertex weight (bottom i, left j; top k, right l) in b1, b2 form."""
    p = _params(p)
    if i == j:
        return Fraction(int(k == i and l == i))
    straight = (k, l) == (i, j)
    turn = (k, l) == (j, i)
    if j > i:
        return p.b1 if straight else (1 - p.b1 if turn else Fraction(0))
    return p.b2 if straight else (1 - p.b2 if turn else Fraction(0))


@lru_cache(maxsize=4096)
def _transition(p: WalkParams, dx: int, dy: int, start: str, end: str) -> Fraction:
    """Probability that a walk entering (0, 0) with ``start`` enters (dx, dy) with ``end``."""
    if dx < 0 or dy < 0:
        return Fraction(0)
    # mass entering each vertex by heading
    grid: dict = {(0, 0, start): Fraction(1)}
    for x in range(dx + 1):
        for y in range(dy + 1):
            for h in (H, V):
                w = grid.get((x, y, h))
                if not w or (x, y) == (dx, dy):
                    continue
                right = (x + 1, y, H)
                up = (x, y + 1, V)
                if x + 1 <= dx:
                    grid[right] = grid.get(right, Fraction(0)) + w * walk_step_weight(p, h, H)
                if y + 1 <= dy:
                    grid[up] = grid.get(up, Fraction(0)) + w * walk_step_weight(p, h, V)
    return grid.get((dx, dy, end), Fraction(0))


def riemann_function(p, X: int, Y: int, x0: int, y0: int) -> Fraction:
    """Discrete Riemann function read off the horizontal-to-vertical walk transition.

    (1 - b1) R(X, Y; x0, y0) is the chance that a walk entering (x0+1, y0)
    from the left later enters (X+1, Y+1) from below. Zero unless X >= x0
    and Y >= y0.
    """
    p = _params(p)
    if X < x0 or Y < y0:
        return Fraction(0)
    return _transition(p, X - x0, Y + 1 - y0, H, V) / (1 - p.b1)


def riemann_function_vertical(p, X: int, Y: int, x0: int, y0: int) -> Fraction:
    """Same function through the vertical-to-horizontal transition."""
    p = _params(p)
    if X < x0 or Y < y0:
        return Fraction(0)
    return _transition(p, X + 1 - x0, Y - y0, V, H) / (1 - p.b2)


def riemann_contour(p, X: int, Y: int, x0: int = 0, y0: int = 0, nodes: int = 4096) -> float:
    """Numerical contour integral for R, as a float cross-check of the walk DP."""
    import numpy as np

    p = _params(p)
    if X < x0 or Y < y0:
        return 0.0
    b1, b2 = float(p.b1), float(p.b2)
    pole_in = -1.0 / (b2 * (1 - b1))
    pole_out = -1.0 / (b1 * (1 - b2))
    radius = 0.5 * abs(pole_in - pole_out)
    theta = np.linspace(0.0, 2 * np.pi, nodes, endpoint=False)
    w = pole_in + radius * np.exp(1j * theta)
    dw = 1j * radius * np.exp(1j * theta)
    f = (((1 + b1 * (1 - b1) * w) / (1 + b2 * (1 - b1) * w)) ** (X - x0)
         * ((1 + b2 * (1 - b2) * w) / (1 + b1 * (1 - b2) * w)) ** (Y - y0)
         * (b2 - b1) / ((1 + b2 * (1 - b1) * w) * (1 + b1 * (1 - b2) * w)))
    return float(np.real(np.mean(f * dw) * 2 * np.pi / (2j * np.pi)))


# intersections of two independent walks

def _check_box(P, Q, name):
    if P[0] > Q[0] or P[1] > Q[1]:
        raise GeometryError(f"{name}: end point must lie weakly up-right of the start point")


def _type_matches(varpi, kind1: str, kind2: str) -> bool:
    if varpi in (None, "any"):
        return True
    return (kind1, kind2) == tuple(varpi)


def intersection_distribution(p, A, B, C, D, varpi="any", a_in: str = H, b_out: str = H,
                              c_in: str = V, d_out: str = V) -> dict:
    """Exact law of the number of type-``varpi`` meetings of two independent walks.

    The first walk enters A with heading ``a_in`` and leaves B with heading
    ``b_out``; the second enters C with ``c_in`` and leaves D with ``d_out``.
    Each walk is conditioned on its endpoints. A meeting is a shared vertex;
    its type is the pair of passage kinds (in heading + out heading) of the
    two walks there, for instance ("HV", "VV").
    """
    p = _params(p)
    A, B, C, D = (tuple(v) for v in (A, B, C, D))
    _check_box(A, B, "A, B")
    _check_box(C, D, "C, D")
    walks = [(A, B, a_in, b_out), (C, D, c_in, d_out)]
    starts = [sum(w[0]) for w in walks]
    ends = [sum(w[1]) for w in walks]

    def moves(idx, pos, h, level):
        """Yield (weight, next state or 'done', passage kind) for one walk."""
        start, end, _, out_req = walks[idx]
        if level == ends[idx]:
            if pos != end:
                return
            yield walk_step_weight(p, h, out_req), "done", h + out_req
            return
        for out in (H, V):
            nxt = (pos[0] + 1, pos[1]) if out == H else (pos[0], pos[1] + 1)
            if nxt[0] > end[0] or nxt[1] > end[1]:
                continue
            yield walk_step_weight(p, h, out), (nxt, out), h + out

    # state: (walk1 state, walk2 state, count); a walk state is None before
    # its start level, "done" after its end level, or (pos, heading)
    states = {(None, None, 0): Fraction(1)}
    lo, hi = min(starts), max(ends)
    for level in range(lo, hi + 1):
        entered = []
        for key, w in states.items():
            s = list(key[:2])
            for idx in range(2):
                if s[idx] is None and level == starts[idx]:
                    s[idx] = (walks[idx][0], walks[idx][2])
            entered.append((tuple(s), key[2], w))
        new: dict = {}
        for (s1, s2), cnt, w in entered:
            opts = []
            for idx, s in enumerate((s1, s2)):
                if isinstance(s, tuple):
                    opts.append(list(moves(idx, s[0], s[1], level)))
                else:
                    opts.append([(Fraction(1), s, None)])
            for (w1, n1, k1), (w2, n2, k2) in itertools.product(*opts):
                c = cnt
                if k1 is not None and k2 is not None and s1[0] == s2[0] and _type_matches(varpi, k1, k2):
                    c += 1
                key = (n1, n2, c)
                new[key] = new.get(key, Fraction(0)) + w * w1 * w2
        states = new
    dist: dict = {}
    for (s1, s2, cnt), w in states.items():
        if s1 == "done" and s2 == "done":
            dist[cnt] = dist.get(cnt, Fraction(0)) + w
    total = sum(dist.values(), Fraction(0))
    if total == 0:
        raise GeometryError("one of the walks cannot connect its endpoints")
    return {k: v / total for k, v in sorted(dist.items()) if v}


def _enumerate_walks(p: WalkParams, start, end, s_in: str, e_out: str):
    dx, dy = end[0] - start[0], end[1] - start[1]
    for steps in set(itertools.permutations(H * dx + V * dy)):
        pos, h, w = start, s_in, Fraction(1)
        visits = []
        for out in steps + (e_out,):
            visits.append((pos, h + out))
            w *= walk_step_weight(p, h, out)
            pos = (pos[0] + 1, pos[1]) if out == H else (pos[0], pos[1] + 1)
            h = out
        yield w, visits


def intersection_distribution_bruteforce(p, A, B, C, D, varpi="any", a_in: str = H,
                                         b_out: str = H, c_in: str = V, d_out: str = V) -> dict:
    """Same law by listing every pair of trajectories."""
    p = _params(p)
    A, B, C, D = (tuple(v) for v in (A, B, C, D))
    _check_box(A, B, "A, B")
    _check_box(C, D, "C, D")
    first = list(_enumerate_walks(p, A, B, a_in, b_out))
    second = list(_enumerate_walks(p, C, D, c_in, d_out))
    dist: dict = {}
    for w1, v1 in first:
        where = dict(v1)
        for w2, v2 in second:
            cnt = sum(1 for pos, k2 in v2 if pos in where and _type_matches(varpi, where[pos], k2))
            dist[cnt] = dist.get(cnt, Fraction(0)) + w1 * w2
    total = sum(dist.values(), Fraction(0))
    return {k: v / total for k, v in sorted(dist.items()) if v}


def surely_intersect(p, A, B, C, D, **headings) -> bool:
    """True when the two walks share a vertex with probability one."""
    return intersection_distribution(p, A, B, C, D, "any", **headings).get(0, Fraction(0)) == 0


def crossing_geometry(A, B, C, D, a_in: str = H, b_out: str = H, c_in: str = V,
                      d_out: str = V) -> str | None:
    """Reason why (A, B; C, D) is not a vertical crossing, or None when it is.

    The second walk must run from at or below the bottom side of S(A, B) to
    at or above its top side, inside the horizontal range of S(A, B). A
    horizontal entry at C needs C strictly below, a horizontal exit at D
    needs D strictly above. A vertical entry at A needs C strictly right of
    A, and a vertical exit at B needs D strictly left of B; without these
    the first walk can slip into S(C, D) without crossing its left side.
    """
    if not (A[0] <= C[0] <= D[0] <= B[0]):
        return "C and D must lie within the horizontal range of S(A, B)"
    if not (C[1] <= A[1] and D[1] >= B[1]):
        return "C must be on or below the bottom side and D on or above the top side"
    if c_in == H and not C[1] < A[1]:
        return "a horizontal entry at C needs C strictly below S(A, B)"
    if d_out == H and not D[1] > B[1]:
        return "a horizontal exit at D needs D strictly above S(A, B)"
    if a_in == V and not C[0] > A[0]:
        return "a vertical entry at A needs C strictly right of A"
    if b_out == V and not D[0] < B[0]:
        return "a vertical exit at B needs D strictly left of B"
    return None


def verify_intersection_shift(p, A, B, C, D, shift, varpi, require_geometry: bool = True,
                              **headings) -> bool:
    """Compare meeting-count laws before and after moving C and D by ``shift``.

    With ``require_geometry`` off only the almost-sure meeting is enforced,
    which is how the failures outside the crossing geometry are exhibited.
    """
    C2 = (C[0] + shift[0], C[1] + shift[1])
    D2 = (D[0] + shift[0], D[1] + shift[1])
    for c, d, label in ((C, D, "before"), (C2, D2, "after")):
        if require_geometry:
            why = crossing_geometry(A, B, c, d, **headings)
            if why:
                raise PreconditionError(f"{why} ({label} the shift)")
        if not surely_intersect(p, A, B, c, d, **headings):
            raise PreconditionError(f"the walks can miss each other {label} the shift")
    return (intersection_distribution(p, A, B, C, D, varpi, **headings)
            == intersection_distribution(p, A, B, C2, D2, varpi, **headings))


def intersecting_position(A, B, C, D) -> bool:
    """Every monotone lattice path A -> B meets every monotone path C -> D."""
    if A[0] > B[0] or A[1] > B[1] or C[0] > D[0] or C[1] > D[1]:
        return False
    return surely_intersect(WalkParams(Fraction(1, 2), Fraction(1, 2)), A, B, C, D)


def crossing_position(A, B, C, D) -> bool:
    """One box is crossed side to side by the other, in either orientation."""
    def vertical(P, Q, S, T):
        return P[0] <= S[0] <= T[0] <= Q[0] and S[1] <= P[1] and T[1] >= Q[1]

    def horizontal(P, Q, S, T):
        return P[1] <= S[1] <= T[1] <= Q[1] and S[0] <= P[0] and T[0] >= Q[0]

    return any(f(*g) for f in (vertical, horizontal) for g in ((A, B, C, D), (C, D, A, B)))


def rd_sum(p, A, B, C, D) -> Fraction:
    """Sum over the plane of R(x,y;A) R(B;x,y) R(x,y;C) R(D;x,y)."""
    p = _params(p)
    xs = range(max(A[0], C[0]), min(B[0], D[0]) + 1)
    ys = range(max(A[1], C[1]), min(B[1], D[1]) + 1)
    total = Fraction(0)
    for x in xs:
        for y in ys:
            total += (riemann_function(p, x, y, *A) * riemann_function(p, *B, x, y)
                      * riemann_function(p, x, y, *C) * riemann_function(p, *D, x, y))
    return total


def verify_rd_sum_shift(p, A, B, C, D, delta, require_crossing: bool = True) -> bool:
    """Check that the four-fold R sum is unchanged when C and D move by ``delta``.

    Intersecting position alone is not enough: A=(0,0), B=(4,0), C=(2,0),
    D=(7,3) with delta=(1,0) is intersecting on both sides yet the sums
    differ. By default one box must cross the other side to side.
    """
    C2 = (C[0] + delta[0], C[1] + delta[1])
    D2 = (D[0] + delta[0], D[1] + delta[1])
    for c, d, label in ((C, D, "before"), (C2, D2, "after")):
        if not intersecting_position(A, B, c, d):
            raise PreconditionError(f"(A, B) and (C, D) are not in intersecting position {label} the shift")
        if require_crossing and not crossing_position(A, B, c, d):
            raise PreconditionError(f"neither box crosses the other {label} the shift")
    return rd_sum(p, A, B, C, D) == rd_sum(p, A, B, C2, D2)


# four point relation

def _corner_heights(base, colors, cutoff):
    """Heights at the four corners around a vertex for the cutoff level."""
    i, j, k, l = colors
    h = base
    left_up = h + (j >= cutoff)
    right_down = h - (i >= cutoff)
    right_up = left_up - (k >= cutoff)
    return h, left_up, right_down, right_up


def four_point_vertex_check(b1, b2, N: int, bottom: int, left: int,
                            base: Sequence[int] | None = None) -> bool:
    """Check the noise mean and covariance identities at one vertex.

    ``base[k]`` is the height H^{>=k} at the lower-left corner (default 0).
    For every cutoff pair i <= j the noise built from the four corner values
    must have conditional mean 0 and the stated conditional covariance.
    """
    p = WalkParams(b1, b2)
    b1, b2, q = p.b1, p.b2, p.q
    base = [0] * (N + 1) if base is None else list(base)
    outs = []
    for k in range(N + 1):
        for l in range(N + 1):
            w = homogeneous_vertex_weight(p, bottom, left, k, l)
            if w:
                outs.append(((bottom, left, k, l), w))

    def xi(colors, c):
        h00, h01, h10, h11 = _corner_heights(base[c], colors, c)
        return q ** h11 - b1 * q ** h01 - b2 * q ** h10 + (b1 + b2 - 1) * q ** h00

    def deltas(c):
        h00, h01, h10, _ = _corner_heights(base[c], (bottom, left, 0, 0), c)
        return q ** h10 - q ** h00, q ** h01 - q ** h00, q ** h00

    for c in range(N + 1):
        if sum(w * xi(col, c) for col, w in outs) != 0:
            return False
    for ci in range(N + 1):
        for cj in range(ci, N + 1):
            lhs = sum(w * xi(col, ci) * xi(col, cj) for col, w in outs)
            dxi, dyi, qi = deltas(ci)
            dxj, dyj, _ = deltas(cj)
            rhs = (b2 * (1 - b1) * dxi * dyj + b1 * (1 - b2) * dyi * dxj
                   - b1 * (1 - b1) * (1 - q) * qi * dyj + b1 * (1 - b2) * (1 - q) * qi * dxj)
            if lhs != rhs:
                return False
    return True


# discrete four point equation

def iterate_four_point_pde(b1, b2, chi: Sequence, psi: Sequence, u, X: int, Y: int) -> Fraction:
    """Solve the inhomogeneous relation by direct recursion.

    Grid index (a, b) stands for the half-integer point (a + 1/2, b + 1/2);
    chi[a] and psi[b] are the values on the bottom and left boundaries.
    """
    p = WalkParams(b1, b2)
    chi = [as_rational(v) for v in chi]
    psi = [as_rational(v) for v in psi]
    if chi[0] != psi[0]:
        raise ValueError("boundary data disagree at the corner")
    src = _source(u)
    phi = {}
    for a in range(X + 1):
        phi[(a, 0)] = chi[a]
    for b in range(Y + 1):
        phi[(0, b)] = psi[b]
    for a in range(1, X + 1):
        for b in range(1, Y + 1):
            phi[(a, b)] = (p.b1 * phi[(a - 1, b)] + p.b2 * phi[(a, b - 1)]
                           - (p.b1 + p.b2 - 1) * phi[(a - 1, b - 1)] + src(a, b))
    return phi[(X, Y)]


def _source(u) -> Callable:
    if u is None:
        return lambda a, b: Fraction(0)
    if isinstance(u, Mapping):
        return lambda a, b: as_rational(u.get((a, b), 0))
    return lambda a, b: as_rational(u(a, b))


def solve_four_point_pde(b1, b2, chi: Sequence, psi: Sequence, u, X: int, Y: int) -> Fraction:
    """Solve the same problem through the Riemann-function representation."""
    p = WalkParams(b1, b2)
    chi = [as_rational(v) for v in chi]
    psi = [as_rational(v) for v in psi]
    if chi[0] != psi[0]:
        raise ValueError("boundary data disagree at the corner")
    src = _source(u)
    R = lambda a, b: riemann_function(p, X, Y, a, b)
    out = chi[0] * R(0, 0)
    for b in range(1, Y + 1):
        out += R(0, b) * (psi[b] - p.b2 * psi[b - 1])
    for a in range(1, X + 1):
        out += R(a, 0) * (chi[a] - p.b1 * chi[a - 1])
    for a in range(1, X + 1):
        for b in range(1, Y + 1):
            out += R(a, b) * src(a, b)
    return out


# second moments of the colored heights

def _three_level(colors, i: int, j: int) -> list[int]:
    return [2 if c >= j else (1 if c >= i else 0) for c in colors]


def shifted_boundary(left_colors: Sequence[int], i: int, j: int, delta: int) -> list[int]:
    """Move the colors >= j down by delta while keeping the >= i profile."""
    lev = _three_level(left_colors, i, j)
    out = []
    for y in range(len(lev) - delta):
        hi = lev[y + delta] == 2
        out.append(2 if hi else (1 if lev[y] >= 1 else 0))
    return out


def _check_moment_preconditions(left_colors, i, j, bi, bj, delta):
    if not i < j:
        raise PreconditionError("need i < j")
    if not bi > bj:
        raise PreconditionError("need B_i > B_j")
    if bj - delta < 0:
        raise PreconditionError("the shifted observation point leaves the quadrant")
    lev = _three_level(left_colors, i, j)
    first_j = next((y for y, c in enumerate(lev) if c == 2), len(lev))
    if first_j < delta:
        # otherwise part of the shifted block leaves the quadrant and the moments change
        raise PreconditionError("colors >= j must start at least delta rows above the bottom")
    for y in range(first_j - delta, len(lev)):
        if lev[y] < 1:
            raise PreconditionError("colors >= i must fill every row from A - delta upwards")


def height_moments(b1, b2, left_colors: Sequence[int], i: int, j: int, bi: int, bj: int, X: int) -> dict:
    """First and second moments of (q^{H>=i}(X, bi), q^{H>=j}(X, bj))."""
    p = WalkParams(b1, b2)
    lev = _three_level(left_colors, i, j)
    Y = max(bi, bj)
    if len(lev) < Y:
        raise GeometryError("boundary data must cover every row below the observation points")
    ones = [Fraction(1)] * Y
    cols = [p.z] * X
    dist = quadrant_joint_distribution(X, Y, ones, cols, p.q, [(1, (X, bi)), (2, (X, bj))],
                                       left_colors=lev[:Y])
    q = p.q
    m = {"Ei": 0, "Ej": 0, "Eii": 0, "Ejj": 0, "Eij": 0}
    for (hi, hj), w in dist.items():
        m["Ei"] += w * q ** hi
        m["Ej"] += w * q ** hj
        m["Eii"] += w * q ** (2 * hi)
        m["Ejj"] += w * q ** (2 * hj)
        m["Eij"] += w * q ** (hi + hj)
    return m


def verify_second_moment_shift(b1, b2, left_colors: Sequence[int], i: int, j: int,
                               bi: int, bj: int, delta: int, X: int) -> bool:
    """Moments before and after shifting the colors >= j and their observation point down."""
    _check_moment_preconditions(left_colors, i, j, bi, bj, delta)
    before = height_moments(b1, b2, left_colors, i, j, bi, bj, X)
    moved = shifted_boundary(left_colors, i, j, delta)
    after = height_moments(b1, b2, [{0: 0, 1: i, 2: j}[c] for c in moved], i, j, bi, bj - delta, X)
    return before == after
