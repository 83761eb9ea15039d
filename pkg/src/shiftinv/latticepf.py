"""Exact partition functions on down-right domains.

Paths are step strings over {"R", "D"}. A domain is a pair of paths P >= Q of
equal length with the same endpoints; the cells between them are the vertices.
Row rapidities x are attached to the D steps of Q (in path order) and column
rapidities y to the R steps of Q. The cell in row r and column c has spectral
parameter y[c] / x[r].

Incoming colors sit on the steps of Q: a D step is a horizontal line entering
from the left, an R step is a vertical line entering from below. Outgoing
colors sit on P: an R step exits through the top, a D step through the right.
Positions are 1-indexed along the path in all public functions.

Quadrant coordinates. The point (a, b) with integers a, b >= 0 is the lattice
corner between columns a, a+1 and rows b, b+1. In half-integer dual-lattice
notation this is the face (a + 1/2, b + 1/2). The colored height
H^{>=m}(a, b) counts paths of color >= m that cross the segment {a} x [0, b].
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .exactnum import as_rational, random_rational
from .vertexcore import outcomes, r_weight

MAX_FRONTIER = 12


class DomainError(ValueError):
    pass


class PreconditionError(ValueError):
    """A theorem hypothesis does not hold for the requested instance."""


def _prefix_rights(steps: str) -> list[int]:
    out = [0]
    for s in steps:
        out.append(out[-1] + (s == "R"))
    return out


@dataclass(frozen=True)
class DownRightDomain:
    P: str
    Q: str
    x: tuple
    y: tuple
    q: Fraction = field(default=Fraction(1, 2))

    def __post_init__(self):
        P, Q = self.P.upper(), self.Q.upper()
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "x", tuple(as_rational(v) for v in self.x))
        object.__setattr__(self, "y", tuple(as_rational(v) for v in self.y))
        object.__setattr__(self, "q", as_rational(self.q))
        if set(P) - {"R", "D"} or set(Q) - {"R", "D"}:
            raise DomainError("paths are strings over R and D")
        if len(P) != len(Q):
            raise DomainError("P and Q must have the same length")
        if P.count("R") != Q.count("R"):
            raise DomainError("P and Q must share endpoints")
        rp, rq = _prefix_rights(P), _prefix_rights(Q)
        if any(a < b for a, b in zip(rp, rq)):
            raise DomainError("P must lie weakly above Q")
        if len(self.x) != Q.count("D"):
            raise DomainError(f"need {Q.count('D')} row rapidities, got {len(self.x)}")
        if len(self.y) != Q.count("R"):
            raise DomainError(f"need {Q.count('R')} column rapidities, got {len(self.y)}")
        if len(P) > 40:
            raise DomainError("path too long for exact evaluation")

    @property
    def M(self) -> int:
        return len(self.P)

    @property
    def n_cells(self) -> int:
        rp, rq = _prefix_rights(self.P), _prefix_rights(self.Q)
        return sum(a - b for a, b in zip(rp, rq))

    def with_rapidities(self, x=None, y=None) -> "DownRightDomain":
        return DownRightDomain(self.P, self.Q, tuple(self.x if x is None else x),
                               tuple(self.y if y is None else y), self.q)


def _flip_schedule(P: str, Q: str) -> tuple[list[tuple[int, int, int]], list[tuple[str, int]]]:
    """Cell flips turning Q into P, each as (position, row, column), 0-indexed.

    A flip replaces the corner "D R" at positions (t, t+1) by "R D". The final
    list gives the step kind and line label carried by each step of P.
    """
    steps = []
    rows = cols = 0
    for s in Q:
        if s == "D":
            steps.append(("D", rows))
            rows += 1
        else:
            steps.append(("R", cols))
            cols += 1
    target = _prefix_rights(P)
    cur = _prefix_rights(Q)
    flips = []
    while True:
        for t in range(len(steps) - 1):
            # after the flip the point between t and t+1 gains one right step
            if steps[t][0] == "D" and steps[t + 1][0] == "R" and cur[t + 1] < target[t + 1]:
                row, col = steps[t][1], steps[t + 1][1]
                flips.append((t, row, col))
                steps[t], steps[t + 1] = steps[t + 1], steps[t]
                cur[t + 1] += 1
                break
        else:
            break
    if "".join(s for s, _ in steps) != P:
        raise DomainError("could not sweep Q onto P")
    return flips, steps


def _apply_flip(states: dict, t: int, z, q) -> dict:
    cache = {}
    new: dict = {}
    for key, w in states.items():
        colors = key[0]
        j, i = colors[t], colors[t + 1]
        outs = cache.get((i, j))
        if outs is None:
            outs = [(k, l, r_weight(q, z, i, j, k, l)) for k, l in outcomes(i, j)]
            outs = [o for o in outs if o[2] != 0]
            cache[(i, j)] = outs
        for k, l, rw in outs:
            c = list(colors)
            c[t], c[t + 1] = k, l
            nk = (tuple(c),) + key[1:]
            new[nk] = new.get(nk, Fraction(0)) + w * rw
    return new


@lru_cache(maxsize=256)
def out_distribution(dom: DownRightDomain, incoming: tuple) -> dict:
    """Map every outgoing coloring of P to Z_{P/Q}(out | incoming)."""
    incoming = tuple(incoming)
    if len(incoming) != dom.M:
        raise DomainError("incoming coloring has the wrong length")
    flips, _ = _flip_schedule(dom.P, dom.Q)
    states = {(incoming,): Fraction(1)}
    for t, row, col in flips:
        states = _apply_flip(states, t, dom.y[col] / dom.x[row], dom.q)
    return {k[0]: v for k, v in states.items()}


def partition_function(dom: DownRightDomain, out: Sequence[int], incoming: Sequence[int]) -> Fraction:
    if len(out) != dom.M or len(incoming) != dom.M:
        raise DomainError("colorings must have the length of the paths")
    return out_distribution(dom, tuple(incoming)).get(tuple(out), Fraction(0))


def step_labels(dom: DownRightDomain) -> list[tuple[str, int]]:
    """(kind, 0-indexed row or column) for each step of P."""
    return _flip_schedule(dom.P, dom.Q)[1]


def q_step_labels(dom: DownRightDomain) -> list[tuple[str, int]]:
    out = []
    rows = cols = 0
    for s in dom.Q:
        if s == "D":
            out.append(("D", rows))
            rows += 1
        else:
            out.append(("R", cols))
            cols += 1
    return out


def height_value(coloring: Sequence[int], m: int, k: int) -> int:
    """Number of positions >= k (1-indexed) carrying a color >= m."""
    return sum(1 for c in coloring[k - 1:] if c >= m)


def joint_height_distribution(dom: DownRightDomain, incoming: Sequence[int],
                              queries: Sequence[tuple[int, int]]) -> dict:
    """Exact law of (H^{>=m}(P; k) for (m, k) in queries)."""
    dist: dict = {}
    for out, w in out_distribution(dom, tuple(incoming)).items():
        key = tuple(height_value(out, m, k) for m, k in queries)
        dist[key] = dist.get(key, Fraction(0)) + w
    return {k: v for k, v in dist.items() if v != 0}


# ---------------------------------------------------------------- shift theorem

@dataclass(frozen=True)
class ShiftInstance:
    """Data of one Phi/Psi comparison. Positions are 1-indexed along the paths."""
    dom: DownRightDomain
    A: frozenset
    B: frozenset
    fixed: tuple            # ((position, color), ...) for positions in A and B
    incoming: tuple
    m: int
    h: int
    k: int
    l: int
    N: int
    step: str = "D"


def _validate(inst: ShiftInstance) -> None:
    dom, M, m, N = inst.dom, inst.dom.M, inst.m, inst.N
    if not (1 <= inst.k <= M and 1 <= inst.l <= M):
        raise PreconditionError("k and l must lie in 1..M")
    if dom.P[inst.k - 1] != inst.step or dom.Q[inst.l - 1] != inst.step:
        raise PreconditionError(f"step k of P and step l of Q must both be {inst.step}")
    if not set(inst.A) <= set(range(1, inst.k)):
        raise PreconditionError("A must be a subset of 1..k-1")
    if not set(inst.B) <= set(range(inst.k + 1, M + 1)):
        raise PreconditionError("B must be a subset of k+1..M")
    fixed = dict(inst.fixed)
    if set(fixed) != set(inst.A) | set(inst.B):
        raise PreconditionError("fixed colors must be given exactly on A and B")
    for a in inst.A:
        if not 0 <= fixed[a] <= m - 1:
            raise PreconditionError(f"fixed color at {a} must lie in 0..m-1")
    for b in inst.B:
        if not m + 1 <= fixed[b] <= N:
            raise PreconditionError(f"fixed color at {b} must lie in m+1..N")
    inc = inst.incoming
    if len(inc) != M:
        raise PreconditionError("incoming coloring has the wrong length")
    for a, c in enumerate(inc, start=1):
        if a < inst.l and not m + 1 <= c <= N:
            raise PreconditionError(f"incoming color at {a} must lie in m+1..N")
        if a == inst.l and c != m:
            raise PreconditionError(f"incoming color at l={a} must equal m")
        if a > inst.l and not 0 <= c <= m - 1:
            raise PreconditionError(f"incoming color at {a} must lie in 0..m-1")
    if inst.step not in ("D", "R"):
        raise PreconditionError("step must be 'D' or 'R'")
    if not rows_ordered(inst.dom, inst.k, inst.l, inst.step):
        raise PreconditionError(
            "the line through step k of P must not lie below (D) or left of (R) "
            "the line through step l of Q")


def rows_ordered(dom: DownRightDomain, k: int, l: int, step: str) -> bool:
    """Relative position needed for the Phi = Psi identity.

    For downward steps the row crossing step k of P must be the row crossing
    step l of Q or lie above it; for rightward steps the column through step k
    of P must coincide with or lie right of the one through step l of Q.
    Without this the identity fails already on a two-cell domain.
    """
    lab_p = step_labels(dom)[k - 1][1]
    lab_q = q_step_labels(dom)[l - 1][1]
    # rows are numbered top to bottom, columns left to right
    return lab_p <= lab_q if step == "D" else lab_p >= lab_q


def _out_allowed(inst: ShiftInstance, out: Sequence[int]) -> bool:
    fixed = dict(inst.fixed)
    m = inst.m
    for a in range(1, inst.k):
        c = out[a - 1]
        if a in inst.A:
            if c != fixed[a]:
                return False
        elif c < m:
            return False
    for b in range(inst.k + 1, inst.dom.M + 1):
        c = out[b - 1]
        if b in inst.B:
            if c != fixed[b]:
                return False
        elif c > m:
            return False
    return True


def _indicator(inst: ShiftInstance, out: Sequence[int], shifted: bool) -> bool:
    m, k, h = inst.m, inst.k, inst.h
    if inst.step == "D":
        if shifted:
            return height_value(out, m + 1, k) == h
        return height_value(out, m, k + 1) == h
    # rightward variant, the mirror image of the downward one
    if shifted:
        return sum(1 for c in out[:k] if c <= m - 1) == h
    return sum(1 for c in out[:k - 1] if c <= m) == h


def _summed_quantity(inst: ShiftInstance, dom: DownRightDomain, shifted: bool) -> Fraction:
    total = Fraction(0)
    for out, w in out_distribution(dom, tuple(inst.incoming)).items():
        if _out_allowed(inst, out) and _indicator(inst, out, shifted):
            total += w
    return total


def phi_quantity(inst: ShiftInstance) -> Fraction:
    _validate(inst)
    return _summed_quantity(inst, inst.dom, shifted=False)


def swapped_domain(inst: ShiftInstance) -> DownRightDomain:
    """Domain with the two distinguished rapidities exchanged."""
    dom = inst.dom
    kind_p, lab_p = step_labels(dom)[inst.k - 1]
    kind_q, lab_q = q_step_labels(dom)[inst.l - 1]
    if inst.step == "D":
        x = list(dom.x)
        x[lab_p], x[lab_q] = x[lab_q], x[lab_p]
        return dom.with_rapidities(x=x)
    y = list(dom.y)
    y[lab_p], y[lab_q] = y[lab_q], y[lab_p]
    return dom.with_rapidities(y=y)


def psi_quantity(inst: ShiftInstance, swap: bool = False) -> Fraction:
    """Psi on the instance's domain, or on the swapped domain if ``swap``."""
    _validate(inst)
    dom = swapped_domain(inst) if swap else inst.dom
    return _summed_quantity(inst, dom, shifted=True)


def verify_shift_theorem(inst: ShiftInstance) -> tuple[bool, Fraction, Fraction]:
    phi = phi_quantity(inst)
    psi = psi_quantity(inst, swap=True)
    return phi == psi, phi, psi


def reflect_domain(dom: DownRightDomain) -> DownRightDomain:
    """Mirror image about the SW-NE diagonal; rapidities are inverted."""
    flip = {"R": "D", "D": "R"}
    P = "".join(flip[s] for s in reversed(dom.P))
    Q = "".join(flip[s] for s in reversed(dom.Q))
    x = tuple(1 / v for v in reversed(dom.y))
    y = tuple(1 / v for v in reversed(dom.x))
    return DownRightDomain(P, Q, x, y, dom.q)


def reflect_coloring(coloring: Sequence[int], N: int) -> tuple:
    return tuple(N - c for c in reversed(coloring))


def reflect_instance(inst: ShiftInstance) -> ShiftInstance:
    """Rightward instance rewritten as a downward one on the mirrored domain."""
    M, N = inst.dom.M, inst.N
    pos = lambda t: M + 1 - t
    step = {"R": "D", "D": "R"}[inst.step]
    fixed = tuple(sorted((pos(t), N - c) for t, c in inst.fixed))
    return ShiftInstance(
        dom=reflect_domain(inst.dom),
        A=frozenset(pos(t) for t in inst.B),
        B=frozenset(pos(t) for t in inst.A),
        fixed=fixed,
        incoming=reflect_coloring(inst.incoming, N),
        m=N - inst.m, h=inst.h, k=pos(inst.k), l=pos(inst.l), N=N, step=step,
    )


# ------------------------------------------------------------ domain families

def two_row_domain(a: int, b: int, c: int, x, y, q) -> DownRightDomain:
    """Q = D R^a D R^b and P = R^c D R^(a+b-c) D, requiring c >= a."""
    if c < a or c > a + b:
        raise DomainError("two-row domain needs a <= c <= a + b")
    return DownRightDomain("R" * c + "D" + "R" * (a + b - c) + "D",
                           "D" + "R" * a + "D" + "R" * b, x, y, q)


def z_shaped_domain(a: int, r: int, b: int, c: int, x, y, q) -> DownRightDomain:
    """Q = D R^a D^r R^b and P = R^c D^r R^(a+b-c) D: r-1 internal rows."""
    if c < a or c > a + b:
        raise DomainError("Z-shaped domain needs a <= c <= a + b")
    return DownRightDomain("R" * c + "D" * r + "R" * (a + b - c) + "D",
                           "D" + "R" * a + "D" * r + "R" * b, x, y, q)


def random_path_pair(rng: random.Random, n_right: int, n_down: int, max_cells: int,
                     tries: int = 200) -> tuple[str, str]:
    """Random P >= Q with the given step counts and 1..max_cells cells."""
    for _ in range(tries):
        Q = ["R"] * n_right + ["D"] * n_down
        rng.shuffle(Q)
        P = ["R"] * n_right + ["D"] * n_down
        rng.shuffle(P)
        P, Q = "".join(P), "".join(Q)
        rp, rq = _prefix_rights(P), _prefix_rights(Q)
        if any(a < b for a, b in zip(rp, rq)):
            P, Q = Q, P
            rp, rq = rq, rp
        if any(a < b for a, b in zip(rp, rq)):
            continue
        cells = sum(a - b for a, b in zip(rp, rq))
        if 1 <= cells <= max_cells:
            return P, Q
    raise DomainError("no admissible random domain found")


def random_rapidities(rng: random.Random, n: int, q: Fraction) -> tuple:
    out = []
    while len(out) < n:
        v = random_rational(rng, Fraction(1, 10), 10, max_den=50)
        if v not in out:
            out.append(v)
    return tuple(out)


def safe_rapidities(rng: random.Random, n_rows: int, n_cols: int, q: Fraction):
    """Rapidities avoiding every pole y/x = 1/q and the degenerate point y = x."""
    while True:
        x = random_rapidities(rng, n_rows, q)
        y = random_rapidities(rng, n_cols, q)
        if all(q * b != a for a in x for b in y) and not set(x) & set(y):
            return x, y


def random_shift_instance(rng: random.Random, dom: DownRightDomain, N: int,
                          step: str = "D", prefer_nonzero: bool = True) -> ShiftInstance | None:
    """Random admissible Phi/Psi data on ``dom``; None if the domain admits none."""
    M = dom.M
    ks = [t for t in range(1, M + 1) if dom.P[t - 1] == step]
    ls = [t for t in range(1, M + 1) if dom.Q[t - 1] == step]
    options = []
    for k in ks:
        for l in ls:
            if not rows_ordered(dom, k, l, step):
                continue
            for m in range(0, N + 1):
                if l > 1 and m + 1 > N:
                    continue
                if l < M and m < 1:
                    continue
                options.append((k, l, m))
    if not options:
        return None
    k, l, m = rng.choice(options)
    incoming = tuple(rng.randint(m + 1, N) if a < l else m if a == l else rng.randint(0, m - 1)
                     for a in range(1, M + 1))
    A = frozenset(a for a in range(1, k) if m >= 1 and rng.random() < 0.4)
    B = frozenset(b for b in range(k + 1, M + 1) if m + 1 <= N and rng.random() < 0.4)
    fixed = tuple(sorted([(a, rng.randint(0, m - 1)) for a in A] +
                         [(b, rng.randint(m + 1, N)) for b in B]))
    base = ShiftInstance(dom, A, B, fixed, incoming, m, 0, k, l, N, step)
    hs = list(range(0, M + 1))
    rng.shuffle(hs)
    if prefer_nonzero:
        for h in hs:
            cand = ShiftInstance(dom, A, B, fixed, incoming, m, h, k, l, N, step)
            if phi_quantity(cand) != 0:
                return cand
    return ShiftInstance(dom, A, B, fixed, incoming, m, hs[0], k, l, N, step)


# ---------------------------------------------------------------- merging

def check_domain_merge(dom: DownRightDomain, incoming: Sequence[int], cutoff: int) -> bool:
    """Merging colors >= cutoff commutes with taking partition functions."""
    proj = lambda col: tuple(min(c, cutoff) for c in col)
    merged_in = proj(incoming)
    lumped: dict = {}
    for out, w in out_distribution(dom, tuple(incoming)).items():
        key = proj(out)
        lumped[key] = lumped.get(key, Fraction(0)) + w
    direct = out_distribution(dom, merged_in)
    keys = set(lumped) | set(direct)
    return all(lumped.get(k, 0) == direct.get(k, 0) for k in keys)


# ---------------------------------------------------------------- quadrant

def quadrant_joint_distribution(X: int, Y: int, x: Sequence, y: Sequence, q,
                                queries: Sequence[tuple[int, tuple[int, int]]],
                                left_colors: Sequence[int] | None = None) -> dict:
    """Law of (H^{>=m}(a, b) for (m, (a, b)) in queries) in the rainbow quadrant.

    Rows 1..Y enter from the left with color equal to the row index unless
    ``left_colors`` (bottom to top) says otherwise; nothing enters from below. Only columns 1..X and rows 1..Y are simulated, which is
    exact as long as every query satisfies a <= X and b <= Y.
    x[r-1] is the rapidity of row r and y[c-1] that of column c.
    """
    q = as_rational(q)
    x = [as_rational(v) for v in x]
    y = [as_rational(v) for v in y]
    if len(x) < Y or len(y) < X:
        raise DomainError("not enough rapidities for the requested extent")
    for m, (a, b) in queries:
        if not (0 <= a <= X and 0 <= b <= Y):
            raise DomainError(f"query point {(a, b)} outside the simulated extent")
    # state: colors on the horizontal edges right of the last finished column
    # (rows bottom to top) plus the heights recorded so far. Edges leaving
    # through the top of row Y never return, so they are dropped.
    by_col: dict = {}
    for idx, (m, (a, b)) in enumerate(queries):
        by_col.setdefault(a, []).append((idx, m, b))
    n = len(queries)

    def record(colors, rec, a):
        rec = list(rec)
        for idx, m, b in by_col.get(a, []):
            rec[idx] = sum(1 for c in colors[:b] if c >= m)
        return tuple(rec)

    start = tuple(range(1, Y + 1)) if left_colors is None else tuple(left_colors)[:Y]
    if len(start) != Y:
        raise DomainError("need one left color per row")
    states = {(start, record(start, (None,) * n, 0)): Fraction(1)}
    for a in range(1, X + 1):
        # sweep column a bottom to top; the vertical line enters empty
        layer: dict = {}
        for (colors, rec), w in states.items():
            partial = {(colors, 0): w}
            for r in range(Y):
                z = y[a - 1] / x[r]
                nxt: dict = {}
                for (cols, up), pw in partial.items():
                    j = cols[r]
                    for k, l in outcomes(up, j):
                        rw = r_weight(q, z, up, j, k, l)
                        if rw == 0:
                            continue
                        nc = cols[:r] + (l,) + cols[r + 1:]
                        key = (nc, k)
                        nxt[key] = nxt.get(key, Fraction(0)) + pw * rw
                partial = nxt
            for (cols, _top), pw in partial.items():
                key = (cols, record(cols, rec, a))
                layer[key] = layer.get(key, Fraction(0)) + pw
        states = layer
    dist: dict = {}
    for (_, rec), w in states.items():
        dist[rec] = dist.get(rec, Fraction(0)) + w
    return {k: v for k, v in dist.items() if v != 0}


def _succeq(u, v) -> bool:
    return u[0] <= v[0] and u[1] >= v[1]


def check_quadrant_preconditions(queries: Sequence[tuple[int, tuple[int, int]]], iota: int) -> None:
    """Raise PreconditionError unless the ordering hypotheses hold (iota 1-indexed)."""
    n = len(queries)
    if not 1 <= iota <= n:
        raise PreconditionError("iota out of range")
    ms = [m for m, _ in queries]
    us = [u for _, u in queries]
    ms2 = list(ms)
    ms2[iota - 1] += 1
    us2 = list(us)
    us2[iota - 1] = (us[iota - 1][0], us[iota - 1][1] + 1)
    for label, mm in (("m", ms), ("m'", ms2)):
        if mm[0] < 0 or any(mm[i] > mm[i + 1] for i in range(n - 1)):
            raise PreconditionError(f"cutoffs {label} must satisfy 0 <= m_1 <= ... <= m_n")
    if ms[iota - 1] < 1:
        raise PreconditionError("the shifted cutoff m_iota must be >= 1")
    if us[iota - 1][1] + 1 < ms[iota - 1]:
        # the exchanged row p = b + 1 must not lie below row m; otherwise the
        # identity fails on small examples
        raise PreconditionError("the shifted point must sit at height b_iota + 1 >= m_iota")
    for label, uu in (("U", us), ("U'", us2)):
        c = uu[iota - 1]
        for j in range(n):
            if j < iota - 1 and not _succeq(uu[j], c):
                raise PreconditionError(f"{label}_{j + 1} must dominate {label}_{iota} (up-left)")
            if j > iota - 1 and not _succeq(c, uu[j]):
                raise PreconditionError(f"{label}_{iota} must dominate {label}_{j + 1} (up-left)")


def shifted_queries(queries, iota: int):
    out = list(queries)
    m, (a, b) = out[iota - 1]
    out[iota - 1] = (m + 1, (a, b + 1))
    return out


def verify_quadrant_shift(X: int, Y: int, x: Sequence, y: Sequence, q,
                          queries: Sequence[tuple[int, tuple[int, int]]], iota: int,
                          swap: bool = True) -> tuple[bool, dict, dict]:
    """Compare the query law with the law of the shifted query vector.

    The shifted side uses the model where the row rapidities of row m_iota and
    of row p = b_iota + 1 (the height of the shifted point) are exchanged.
    ``swap=False`` skips the exchange, which is not a valid identity and is
    only useful as a negative control.
    """
    check_quadrant_preconditions(queries, iota)
    shifted = shifted_queries(queries, iota)
    m, (a, b) = queries[iota - 1]
    p = b + 1
    if p > Y:
        raise DomainError("extent too small for the shifted point")
    x2 = list(x)
    if swap:
        x2[m - 1], x2[p - 1] = x2[p - 1], x2[m - 1]
    d1 = quadrant_joint_distribution(X, Y, x, y, q, queries)
    d2 = quadrant_joint_distribution(X, Y, x2, y, q, shifted)
    return d1 == d2, d1, d2


def quadrant_domain(X: int, Y: int, x: Sequence, y: Sequence, q) -> tuple[DownRightDomain, tuple]:
    """The X by Y rectangle as a down-right domain with rainbow incoming colors.

    Q runs down the left side (top row first) and then along the bottom, so
    the row rapidities are listed top to bottom.
    """
    dom = DownRightDomain("R" * X + "D" * Y, "D" * Y + "R" * X,
                          tuple(reversed(list(x)[:Y])), tuple(list(y)[:X]), q)
    incoming = tuple(range(Y, 0, -1)) + (0,) * X
    return dom, incoming
