"""Randomized exact verification suites.

Each suite draws random rational parameters from a seeded ``random.Random``
and checks one identity by exact comparison of two independent computations.
A suite yields ``(parameters, ok)`` pairs; :func:`run_suite` collects them
into a :class:`SuiteResult` whose failures carry the offending parameters.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from . import fusion, latticepf, vertexcore, walkcov
from .exactnum import random_rational
from .polysim import shift_violations
from .vertexcore import PoleError


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    skipped: int = 0
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0

    def to_dict(self) -> dict:
        return {"name": self.name, "checked": self.checked, "passed": self.passed,
                "skipped": self.skipped, "seconds": round(self.seconds, 3),
                "failures": self.failures[:20]}


def _show(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_show(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _show(x) for k, x in v.items()}
    return v if isinstance(v, (int, float, str, bool, type(None))) else str(v)


def _r(rng, lo=0, hi=1, den=40, avoid=()):
    return random_rational(rng, lo, hi, den, avoid)


def _generic(rng) -> Fraction:
    # spectral parameters may leave (0, 1); the identities are algebraic
    return _r(rng, -3, 3, 30, avoid=(0, 1, -1))


# vertex weights

def suite_stochasticity(rng, trials):
    for N in (1, 2, 3):
        for _ in range(trials):
            q, z = _r(rng), _generic(rng)
            if q * z == 1:
                continue
            bad = [(i, j) for i in range(N + 1) for j in range(N + 1)
                   if not vertexcore.check_stochasticity(q, z, i, j, N)]
            yield {"N": N, "q": q, "z": z, "bad_inputs": bad}, not bad


def suite_ybe(rng, trials):
    for N in (1, 2, 3):
        for _ in range(trials):
            q = _r(rng)
            x, y, z = (_r(rng, 0, 4, 30) for _ in range(3))
            try:
                bad = [e for e, l, r in vertexcore.yang_baxter_sides(q, x, y, z, N) if l != r]
            except PoleError:
                continue
            yield {"N": N, "q": q, "x": x, "y": y, "z": z, "bad_externals": bad[:3]}, not bad


def suite_unitarity(rng, trials):
    for N in (1, 2, 3):
        for _ in range(trials):
            q = _r(rng)
            x, y = _r(rng, 0, 4, 30), _r(rng, 0, 4, 30)
            try:
                bad = [e for e, v, ex in vertexcore.unitarity_sides(q, x, y, N) if v != ex]
            except PoleError:
                continue
            yield {"N": N, "q": q, "x": x, "y": y, "bad_externals": bad[:3]}, not bad


def suite_merge(rng, trials):
    for N in (1, 2, 3):
        for _ in range(max(1, trials // 3)):
            q, z = _r(rng), _generic(rng)
            if q * z == 1:
                continue
            for cutoff in range(1, N + 1):
                for i in range(N + 1):
                    for j in range(N + 1):
                        ok = vertexcore.check_merge(q, z, cutoff, i, j, N)
                        yield {"N": N, "q": q, "z": z, "cutoff": cutoff, "i": i, "j": j}, ok


def suite_reflection(rng, trials):
    for N in (1, 2, 3):
        for _ in range(max(1, trials // 3)):
            q, z = _r(rng), _generic(rng)
            if q * z == 1:
                continue
            bad = [c for c in itertools.product(range(N + 1), repeat=4)
                   if not vertexcore.check_reflection(q, z, *c, N)]
            yield {"N": N, "q": q, "z": z, "bad": bad[:3]}, not bad


# partition functions on domains

def _random_domain(rng, kind):
    q = _r(rng, 0, 1, 50)
    if kind == "two-row":
        a = rng.randint(0, 2)
        b = rng.randint(0, 4 - a)
        c = rng.randint(a, a + b)
        x, y = latticepf.safe_rapidities(rng, 2, a + b, q)
        return latticepf.two_row_domain(a, b, c, x, y, q)
    if kind == "z-shaped":
        r = rng.randint(2, 3)
        a = rng.randint(0, 2)
        b = rng.randint(0, 6 - r - a)
        c = rng.randint(a, a + b)
        x, y = latticepf.safe_rapidities(rng, r + 1, a + b, q)
        return latticepf.z_shaped_domain(a, r, b, c, x, y, q)
    nR, nD = rng.randint(1, 5), rng.randint(1, 5)
    P, Q = latticepf.random_path_pair(rng, nR, nD, 12)
    x, y = latticepf.safe_rapidities(rng, nD, nR, q)
    return latticepf.DownRightDomain(P, Q, x, y, q)


def suite_shift(rng, trials):
    kinds = ("two-row", "z-shaped", "generic")
    done = 0
    attempts = 0
    while done < trials and attempts < 20 * trials:
        attempts += 1
        kind = kinds[done % 3]
        try:
            dom = _random_domain(rng, kind)
        except latticepf.DomainError:
            continue
        step = "D" if kind != "generic" else rng.choice("DR")
        inst = latticepf.random_shift_instance(rng, dom, rng.randint(1, 3), step)
        if inst is None:
            continue
        done += 1
        ok, phi, psi = latticepf.verify_shift_theorem(inst)
        yield {"kind": kind, "P": dom.P, "Q": dom.Q, "x": dom.x, "y": dom.y, "q": dom.q,
               "k": inst.k, "l": inst.l, "m": inst.m, "h": inst.h, "N": inst.N, "step": step,
               "A": sorted(inst.A), "B": sorted(inst.B), "fixed": inst.fixed,
               "incoming": inst.incoming, "phi": phi, "psi": psi}, ok


def random_quadrant_queries(rng, X, Y, n):
    """Random query vectors and iota meeting the quadrant-shift hypotheses."""
    for _ in range(500):
        qs = sorted(((rng.randint(0, Y), (rng.randint(0, X), rng.randint(0, Y - 1)))
                     for _ in range(n)), key=lambda t: t[0])
        iota = rng.randint(1, n)
        try:
            latticepf.check_quadrant_preconditions(qs, iota)
        except latticepf.PreconditionError:
            continue
        if qs[iota - 1][1][1] + 1 <= Y:
            return qs, iota
    return None


def suite_quadrant(rng, trials):
    done = 0
    while done < trials:
        X, Y = rng.randint(1, 3), rng.randint(2, 5)
        if X * Y > 12:
            continue
        drawn = random_quadrant_queries(rng, X, Y, rng.randint(1, 3))
        if drawn is None:
            continue
        qs, iota = drawn
        q = _r(rng, 0, 1, 30)
        x = [_r(rng, 1, 3, 20) for _ in range(Y)]
        y = [_r(rng, 0, 1, 20) for _ in range(X)]
        try:
            ok, _, _ = latticepf.verify_quadrant_shift(X, Y, x, y, q, qs, iota)
        except (PoleError, latticepf.DomainError):
            continue
        done += 1
        yield {"X": X, "Y": Y, "q": q, "x": x, "y": y, "queries": qs, "iota": iota}, ok


# fusion

def suite_fusion(rng, trials):
    cases = [(L, M, N) for L in (1, 2, 3) for M in (1, 2, 3) for N in (1, 2)]
    for _ in range(trials):
        q, z = _r(rng, 0, 1, 20), _r(rng, 1, 5, 20)
        for L, M, N in cases:
            bad = []
            try:
                for A in fusion.compositions(M, N):
                    for B in fusion.compositions(L, N):
                        for C in fusion.compositions(M, N):
                            D = tuple(a + b - c for a, b, c in zip(A, B, C))
                            if min(D) < 0 or sum(D) > L:
                                continue
                            if (fusion.lm_fused_closed(q, z, L, M, A, B, C, D)
                                    != fusion.lm_fused_bruteforce(q, z, L, M, A, B, C, D)):
                                bad.append((A, B, C, D))
            except (PoleError, ZeroDivisionError):
                continue
            yield {"L": L, "M": M, "N": N, "q": q, "z": z, "bad": bad[:3]}, not bad


def suite_recursion(rng, trials):
    for _ in range(trials):
        q, z = _r(rng, 0, 1, 20), _r(rng, 1, 5, 20)
        for L, M, N in ((2, 1, 2), (2, 2, 2), (3, 2, 1), (3, 2, 2), (2, 3, 2)):
            bad = []
            try:
                for A in fusion.compositions(M, N):
                    for B in fusion.compositions(L, N):
                        for C in fusion.compositions(M, N):
                            D = tuple(a + b - c for a, b, c in zip(A, B, C))
                            if min(D) < 0 or sum(D) > L:
                                continue
                            if (fusion.bottom_recursion(q, z, L, M, A, B, C, D)
                                    != fusion.lm_fused_closed(q, z, L, M, A, B, C, D)):
                                bad.append((A, B, C, D))
            except (PoleError, ZeroDivisionError):
                continue
            yield {"L": L, "M": M, "N": N, "q": q, "z": z, "bad": bad[:3]}, not bad


def suite_miracle(rng, trials):
    done = 0
    while done < trials:
        N = rng.randint(1, 3)
        r = lambda: _r(rng, 0, 3, 50, avoid=(1,))
        args = (r(), r(), r(), r(), [r() for _ in range(N)], [r() for _ in range(N)],
                [r() for _ in range(N)], [r() for _ in range(N)])
        try:
            v = fusion.miracle_sum_exp(*args)
        except (PoleError, ZeroDivisionError):
            continue
        done += 1
        yield {"q, z, q^M, q^L, q^A, q^B, q^D, q^P": args, "value": v}, v == 1


def suite_fusion_equivalence(rng, trials):
    q = Fraction(1, 3)
    fixed = [
        ((1, 1), 2, [2], [Fraction(1, 5)], [(1, (1, 1))]),
        ((2, 2), 2, [1, 2], [Fraction(1, 5), Fraction(2, 7)], [(1, (1, 1)), (2, (2, 2)), (1, (2, 1))]),
        ((2, 2), 2, [1, 2], [Fraction(1, 5), Fraction(2, 7)], [(1, (1, 2)), (2, (2, 1))]),
    ]
    for extent, L, Ms, zs, qs in fixed:
        yield {"extent": extent, "L": L, "Ms": Ms, "zs": zs, "q": q, "queries": qs}, \
            fusion.verify_fusion_theorem(extent, L, Ms, zs, q, qs)
    for _ in range(max(0, trials - len(fixed))):
        qq = _r(rng, 0, 1, 20)
        zs = [_r(rng, 0, 1, 20) for _ in range(2)]
        Ms = [rng.choice([1, 2]), 2]
        qs = [(rng.randint(1, 2), (rng.randint(0, 2), rng.randint(0, 2))) for _ in range(2)]
        try:
            ok = fusion.verify_fusion_theorem((2, 2), 2, Ms, zs, qq, qs)
        except (PoleError, ZeroDivisionError):
            continue
        yield {"extent": (2, 2), "L": 2, "Ms": Ms, "zs": zs, "q": qq, "queries": qs}, ok


def suite_fused_shift(rng, trials):
    done = 0
    while done < trials:
        L, X, Y = rng.choice([1, 2]), rng.randint(1, 2), rng.randint(2, 3)
        Ms = [rng.choice([1, 2]) for _ in range(X)]
        zs = [_r(rng, 0, 1, 12) for _ in range(X)]
        q = _r(rng, 0, 1, 8)
        n = rng.randint(1, 2)
        delta = rng.randint(1, 2)
        qs = sorted(((rng.randint(0, Y), (rng.randint(0, X), rng.randint(0, Y))) for _ in range(n)),
                    key=lambda t: t[0])
        iota = rng.randint(1, n)
        if shift_violations(qs, iota, delta, "fused"):
            continue
        k, (a, b) = qs[iota - 1]
        if b + delta > Y:
            continue
        shifted = list(qs)
        shifted[iota - 1] = (k + delta, (a, b + delta))
        try:
            d1 = fusion.fused_quadrant_joint_distribution(X, Y, L, Ms, zs, q, qs)
            d2 = fusion.fused_quadrant_joint_distribution(X, Y, L, Ms, zs, q, shifted)
        except (PoleError, ZeroDivisionError):
            continue
        done += 1
        yield {"L": L, "X": X, "Y": Y, "Ms": Ms, "zs": zs, "q": q, "queries": qs,
               "iota": iota, "delta": delta}, d1 == d2


# random walks

def _walk_params(rng):
    while True:
        b1, b2 = _r(rng, 0, 1, 12), _r(rng, 0, 1, 12)
        # b1 = b2 means q = z = 1, a pole of the height model
        if b1 != b2:
            return walkcov.WalkParams(b1, b2)


def suite_four_point(rng, trials):
    for N in (1, 2, 3):
        for _ in range(max(1, trials // 3)):
            p = _walk_params(rng)
            for bottom in range(N + 1):
                for left in range(N + 1):
                    base = [0] + sorted((rng.randint(0, 3) for _ in range(N)), reverse=True)
                    ok = walkcov.four_point_vertex_check(p.b1, p.b2, N, bottom, left, base)
                    yield {"b1": p.b1, "b2": p.b2, "N": N, "bottom": bottom, "left": left,
                           "base": base}, ok


def suite_intersection(rng, trials):
    done = 0
    while done < trials:
        p = _walk_params(rng)
        A = (0, 0)
        B = (rng.randint(0, 4), rng.randint(0, 4))
        cx = rng.randint(0, B[0])
        dx = rng.randint(cx, B[0])
        C = (cx, -rng.randint(0, 2))
        D = (dx, B[1] + rng.randint(0, 2))
        h = {k: rng.choice((walkcov.H, walkcov.V)) for k in ("a_in", "b_out", "c_in", "d_out")}
        shift = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        varpi = rng.choice(list(walkcov.INTERSECTION_TYPES) + ["any"])
        try:
            ok = walkcov.verify_intersection_shift(p, A, B, C, D, shift, varpi, **h)
        except latticepf.PreconditionError:
            continue
        done += 1
        yield {"b1": p.b1, "b2": p.b2, "A": A, "B": B, "C": C, "D": D, "shift": shift,
               "varpi": varpi, **h}, ok


def suite_rd_sum(rng, trials):
    done = 0
    while done < trials:
        p = _walk_params(rng)
        A = (0, 0)
        B = (rng.randint(0, 4), rng.randint(0, 4))
        C = (rng.randint(-2, 4), rng.randint(-2, 4))
        D = (C[0] + rng.randint(0, 4), C[1] + rng.randint(0, 4))
        delta = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        try:
            ok = walkcov.verify_rd_sum_shift(p, A, B, C, D, delta)
        except latticepf.PreconditionError:
            continue
        done += 1
        yield {"b1": p.b1, "b2": p.b2, "A": A, "B": B, "C": C, "D": D, "delta": delta}, ok


def suite_pde(rng, trials):
    for _ in range(trials):
        p = _walk_params(rng)
        X = Y = 4
        chi = [_r(rng, -2, 2, 9) for _ in range(X + 1)]
        psi = [chi[0]] + [_r(rng, -2, 2, 9) for _ in range(Y)]
        u = {(a, b): _r(rng, -2, 2, 9) for a in range(1, X + 1) for b in range(1, Y + 1)}
        lhs = walkcov.iterate_four_point_pde(p.b1, p.b2, chi, psi, u, X, Y)
        rhs = walkcov.solve_four_point_pde(p.b1, p.b2, chi, psi, u, X, Y)
        yield {"b1": p.b1, "b2": p.b2, "chi": chi, "psi": psi, "recursion": lhs, "formula": rhs}, lhs == rhs


def suite_moments(rng, trials):
    done = 0
    while done < trials:
        Y, X, dl = rng.randint(2, 4), rng.randint(1, 2), rng.randint(1, 2)
        cols = [rng.choice([0, 1, 2]) for _ in range(Y + dl + 1)]
        bi = rng.randint(1, Y)
        if bi - 1 < dl:
            continue
        bj = rng.randint(dl, bi - 1)
        p = _walk_params(rng)
        try:
            ok = walkcov.verify_second_moment_shift(p.b1, p.b2, cols, 1, 2, bi, bj, dl, X)
        except latticepf.PreconditionError:
            continue
        done += 1
        yield {"b1": p.b1, "b2": p.b2, "left_colors": cols, "bi": bi, "bj": bj, "delta": dl, "X": X}, ok


SUITES: dict[str, tuple[Callable[..., Iterator], int, str]] = {
    "stochasticity": (suite_stochasticity, 10, "R weights sum to one"),
    "ybe": (suite_ybe, 10, "Yang-Baxter equation, all externals"),
    "unitarity": (suite_unitarity, 10, "two crossings act as the identity"),
    "merge": (suite_merge, 3, "merging a block of colors"),
    "reflection": (suite_reflection, 3, "color reflection symmetry"),
    "shift": (suite_shift, 100, "Phi equals swapped Psi on domains"),
    "quadrant": (suite_quadrant, 30, "quadrant shift invariance"),
    "fusion": (suite_fusion, 5, "closed fused weight against the row/column fusion"),
    "recursion": (suite_recursion, 2, "bottom-row recursion of the fused weight"),
    "miracle": (suite_miracle, 50, "summation identity equals one"),
    "fusion-equiv": (suite_fusion_equivalence, 3, "fused against unfused heights"),
    "fused-shift": (suite_fused_shift, 20, "fused quadrant shift invariance"),
    "four-point": (suite_four_point, 6, "noise mean and covariance per vertex"),
    "intersection": (suite_intersection, 50, "meeting-count laws under shifts"),
    "rd-sum": (suite_rd_sum, 20, "four-fold R sum under shifts"),
    "pde": (suite_pde, 5, "Riemann representation against recursion"),
    "moments": (suite_moments, 20, "second moments under boundary shifts"),
}


def run_suite(name: str, seed: int = 0, trials: int | None = None) -> SuiteResult:
    fn, default, _ = SUITES[name]
    rng = random.Random(f"{name}:{seed}")
    res = SuiteResult(name)
    t0 = time.perf_counter()
    for params, ok in fn(rng, default if trials is None else trials):
        res.checked += 1
        if not ok:
            res.failures.append(_show(params))
    res.seconds = time.perf_counter() - t0
    return res
