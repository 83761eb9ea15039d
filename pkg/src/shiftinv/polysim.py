"""Monte Carlo samplers for the quadrant vertex models and the directed polymers.

Every sampler returns a :class:`SampleBatch`, an R x n matrix of observables
computed on one shared random environment per replica. Randomness comes from
numpy Philox streams spawned off a single master seed: replicas are grouped
into fixed blocks of ``BLOCK`` and block b always uses child b of the master
SeedSequence, so the output does not depend on how many workers ran it.

Query conventions (k, (a, b)):

* vertex models: k is the color cutoff and (a, b) the corner between
  columns a, a+1 and rows b, b+1; the observable counts paths of color >= k
  crossing the vertical segment at column a below that corner.
* Beta and Gamma polymers: start (0, k), end (a, b); the log partition
  function is recorded.
* Brownian LPP and O'Connell-Yor: end (a, b) with a the column index and b
  the time; the start is (start_column, k) by default and (k, 0) when the
  config sets direction = "horizontal".
"""

from __future__ import annotations

import csv
import io
import json
import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate
from pathlib import Path
from typing import Sequence

import numpy as np

from .exactnum import as_rational, format_rational, q_binomial
from .fusion import compositions, incoming_law, lm_fused_closed, split_D_marginal, _add, _sub
from .latticepf import PreconditionError
from .vertexcore import r_weight

BLOCK = 512
VERTEX_MODELS = ("six_vertex", "fused", "continued", "continuous")
POLYMER_MODELS = ("beta", "gamma", "blpp", "oy")
MODELS = VERTEX_MODELS + POLYMER_MODELS


class ParameterError(ValueError):
    pass


@dataclass
class SamplerConfig:
    model: str
    params: dict
    queries: list
    replicas: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        self.queries = [(_num(k), (_num(a), _num(b))) for k, (a, b) in self.queries]
        if self.replicas < 1:
            raise ParameterError("need at least one replica")
        self.seed = int(self.seed)
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {"model": self.model, "params": _jsonable(self.params),
                "queries": [[_jsonable(k), [_jsonable(a), _jsonable(b)]] for k, (a, b) in self.queries],
                "replicas": self.replicas, "seed": str(self.seed)}

    @classmethod
    def from_dict(cls, d: dict) -> "SamplerConfig":
        return cls(d["model"], dict(d.get("params", {})), [(k, tuple(u)) for k, u in d["queries"]],
                   int(d.get("replicas", 1000)), int(d.get("seed", 0)))


def _num(v):
    if isinstance(v, str):
        v = as_rational(v)
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def _real(v) -> float:
    """Float-valued parameter; accepts "p/q" strings as well as numbers."""
    if isinstance(v, (str, Fraction)):
        return float(as_rational(v))
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParameterError(f"cannot read {v!r} as a number")
    return float(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


@dataclass
class SampleBatch:
    observables: np.ndarray
    labels: list
    config: dict
    seed: int
    block_size: int = BLOCK
    meta: dict = field(default_factory=dict)

    @property
    def replicas(self) -> int:
        return self.observables.shape[0]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.labels)
        integral = np.issubdtype(self.observables.dtype, np.integer)
        for row in self.observables:
            w.writerow([str(int(v)) if integral else repr(float(v)) for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def sidecar(self) -> dict:
        return {"config": self.config, "seed": str(self.seed), "block_size": self.block_size,
                "replicas": self.replicas, "labels": self.labels,
                "replica_streams": "replica r uses child r // block_size of the master seed, slot r % block_size",
                **self.meta}

    def to_json(self, path=None) -> str:
        text = json.dumps(self.sidecar(), indent=2, sort_keys=True)
        if path is not None:
            Path(path).write_text(text)
        return text


# randomness

def block_generators(seed: int, replicas: int):
    """Yield (block index, size, Generator) covering all replicas."""
    n_blocks = -(-replicas // BLOCK)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    for b, ss in enumerate(children):
        size = min(BLOCK, replicas - b * BLOCK)
        yield b, size, np.random.Generator(np.random.Philox(ss))


class CategoricalLaw:
    """A finite law with inverse-CDF sampling."""

    def __init__(self, outcomes: Sequence, probs: Sequence[float]):
        total = float(sum(probs))
        if any(p < -1e-15 for p in probs):
            raise ParameterError("negative probability encountered; parameters leave the stochastic region")
        if abs(total - 1) > 1e-9:
            raise ParameterError(f"outcome probabilities sum to {total}, not 1")
        self.outcomes = list(outcomes)
        self.probs = [max(float(p), 0.0) for p in probs]
        self.cdf = list(accumulate(self.probs))
        self.cdf[-1] = 1.0

    def draw(self, u: float):
        return self.outcomes[min(bisect_right(self.cdf, u), len(self.outcomes) - 1)]

    def sample(self, rng: np.random.Generator, size: int) -> list:
        return [self.draw(u) for u in rng.random(size)]


# six-vertex quadrant

def six_vertex_straight_probs(q, z) -> tuple[float, float]:
    """Chance of going straight when the left color is larger, resp. smaller."""
    q, z = as_rational(q), as_rational(z)
    left_larger = r_weight(q, z, 1, 2, 1, 2)
    left_smaller = r_weight(q, z, 2, 1, 2, 1)
    for p in (left_larger, left_smaller):
        if not 0 <= p <= 1:
            raise ParameterError(f"straight probability {p} outside [0, 1] at z = {z}")
    return float(left_larger), float(left_smaller)


def six_vertex_step(p_ll: float, p_ls: float, up: np.ndarray, left: np.ndarray, u: np.ndarray):
    """Vectorized vertex update; returns (top, right) color arrays."""
    p = np.where(left > up, p_ll, p_ls)
    straight = (u < p) | (up == left)
    top = np.where(straight, up, left)
    right = np.where(straight, left, up)
    return top, right


def _six_vertex_block(cfg: SamplerConfig, size: int, rng) -> np.ndarray:
    P = cfg.params
    X, Y = P["extent"]
    q = as_rational(P["q"])
    x = [as_rational(v) for v in P.get("x", [1] * Y)]
    y = [as_rational(v) for v in P["y"]]
    left = P.get("left_colors") or list(range(1, Y + 1))
    probs = [[six_vertex_straight_probs(q, y[a] / x[r]) for r in range(Y)] for a in range(X)]
    colors = np.tile(np.asarray(left[:Y], dtype=np.int64), (size, 1))
    out = np.zeros((size, len(cfg.queries)), dtype=np.int64)

    def record(a):
        for idx, (m, (qa, qb)) in enumerate(cfg.queries):
            if qa == a:
                out[:, idx] = (colors[:, :qb] >= m).sum(axis=1)

    record(0)
    for a in range(X):
        up = np.zeros(size, dtype=np.int64)
        us = rng.random((Y, size))
        for r in range(Y):
            p_ll, p_ls = probs[a][r]
            up, colors[:, r] = six_vertex_step(p_ll, p_ls, up, colors[:, r], us[r])
        record(a + 1)
    return out


def _check_vertex_queries(cfg: SamplerConfig, X: int, Y: int):
    for k, (a, b) in cfg.queries:
        if not (isinstance(a, int) and isinstance(b, int) and isinstance(k, int)):
            raise ParameterError("vertex-model queries use integer cutoffs and corners")
        if not (0 <= a <= X and 0 <= b <= Y):
            raise ParameterError(f"query corner {(a, b)} outside the extent {(X, Y)}")


# fused quadrant

@lru_cache(maxsize=100_000)
def fused_vertex_law(q, w_arg, L: int, M: int, A: tuple, B: tuple) -> CategoricalLaw:
    """Outgoing (C, D) law of a fused vertex, from the closed weight."""
    N = len(A)
    outs, probs = [], []
    for D in compositions(L, N):
        C = _sub(_add(A, B), D)
        if min(C) < 0 or sum(C) > M:
            continue
        w = lm_fused_closed(q, w_arg, L, M, A, B, C, D)
        if w:
            outs.append((C, D))
            probs.append(float(w))
    return CategoricalLaw(outs, probs)


def _fused_block(cfg: SamplerConfig, size: int, rng) -> np.ndarray:
    P = cfg.params
    X, Y = P["extent"]
    q = as_rational(P["q"])
    L = int(P["L"])
    Ms = [int(m) for m in P["Ms"]]
    zs = [as_rational(v) for v in P["zs"]]
    N = Y
    out = np.zeros((size, len(cfg.queries)), dtype=np.int64)
    by_col: dict = {}
    for idx, (m, (a, b)) in enumerate(cfg.queries):
        by_col.setdefault(a, []).append((idx, m, b))
    empty = (0,) * N
    start = [tuple(L if c == y else 0 for c in range(1, N + 1)) for y in range(1, Y + 1)]
    uniforms = rng.random((size, X * Y))
    for s in range(size):
        rows = list(start)
        cursor = 0

        def record(a):
            for idx, m, b in by_col.get(a, []):
                out[s, idx] = sum(sum(r[max(m, 1) - 1:]) for r in rows[:b])

        record(0)
        for a in range(X):
            up = empty
            for r in range(Y):
                law = fused_vertex_law(q, 1 / zs[a], L, Ms[a], up, rows[r])
                up, rows[r] = law.draw(uniforms[s, cursor])
                cursor += 1
            record(a + 1)
    return out


# analytically continued quadrant

def check_continued_region(q, l, ms, z) -> None:
    q, l, z = float(q), float(l), float(z)
    if not 0 < q < 1:
        raise ParameterError("need 0 < q < 1")
    vals = {"z": z, "l": l, "z/l": z / l}
    for i, m in enumerate(ms):
        vals[f"m_{i + 1}"] = float(m)
        vals[f"m_{i + 1}/l"] = float(m) / l
    bad = [k for k, v in vals.items() if not 0 < v < 1]
    if bad:
        raise ParameterError("outside the positivity region 0 < z, l, m_x, z/l, m_x/l < 1: " + ", ".join(bad))


@lru_cache(maxsize=10_000)
def turn_count_law(q, l, m, nA: int) -> CategoricalLaw:
    """Law of |D| given nA paths entering from below."""
    return CategoricalLaw(range(nA + 1), [float(split_D_marginal(q, l, m, nA, d)) for d in range(nA + 1)])


@lru_cache(maxsize=100_000)
def _first_color_law(q, a: int, rest: int, n: int) -> CategoricalLaw:
    # q-Vandermonde split of the q-hypergeometric color law
    ds = range(max(0, n - rest), min(a, n) + 1)
    total = q_binomial(a + rest, n, q)
    probs = [float(q_binomial(a, d, q) * q_binomial(rest, n - d, q) * q ** (d * (rest - n + d)) / total)
             for d in ds]
    return CategoricalLaw(list(ds), probs)


def sample_turning_colors(q, A: tuple, n: int, uniforms) -> tuple:
    """Split n turning paths among the colors of A, smallest color first."""
    D = []
    rest = sum(A)
    it = iter(uniforms)
    for a in A:
        rest -= a
        if n == 0:
            D.append(0)
            continue
        d = _first_color_law(q, a, rest, n).draw(next(it))
        D.append(d)
        n -= d
    return tuple(D)


def continued_vertex_draw(q, l, m, A: tuple, uniforms) -> tuple:
    """Draw D for one vertex of the continued model; uniforms needs len(A) + 1 entries."""
    nA = sum(A)
    if nA == 0:
        return (0,) * len(A)
    n = turn_count_law(q, l, m, nA).draw(uniforms[0])
    return sample_turning_colors(q, A, n, uniforms[1:])


def _continued_block(cfg: SamplerConfig, size: int, rng) -> np.ndarray:
    P = cfg.params
    X, Y = P["extent"]
    q, l, z = as_rational(P["q"]), as_rational(P["l"]), as_rational(P["z"])
    ms = P["m"] if isinstance(P["m"], (list, tuple)) else [P["m"]] * X
    ms = [as_rational(v) for v in ms]
    check_continued_region(q, l, ms, z)
    cdf = np.cumsum(incoming_law(q, z, l))
    cdf[-1] = 1.0
    N = Y
    out = np.zeros((size, len(cfg.queries)), dtype=np.int64)
    by_col: dict = {}
    for idx, (k, (a, b)) in enumerate(cfg.queries):
        by_col.setdefault(a, []).append((idx, k, b))
    incoming = np.searchsorted(cdf, rng.random((size, Y)), side="right")
    uniforms = rng.random((size, X, Y, N + 1))
    empty = (0,) * N
    for s in range(size):
        # colors on the horizontal edges right of the current column
        rows = [tuple(int(incoming[s, y]) if c == y else 0 for c in range(N)) for y in range(Y)]

        def record(a):
            for idx, k, b in by_col.get(a, []):
                out[s, idx] = sum(sum(r[max(k, 1) - 1:]) for r in rows[:b])

        record(0)
        for a in range(X):
            up = empty
            for r in range(Y):
                D = continued_vertex_draw(q, l, ms[a], up, uniforms[s, a, r])
                up, rows[r] = _add(_sub(up, D), rows[r]), D
            record(a + 1)
    return out


# continuous-mass limit of the continued model

def split_masses(alpha: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Masses leaving to the right, given masses alpha from below (last axis = color).

    One shared eta per vertex moves the tail masses by
    exp(-delta_{>=i}) = exp(-alpha_{>=i}) + (1 - exp(-alpha_{>=i})) eta.
    """
    tails = np.flip(np.cumsum(np.flip(alpha, -1), -1), -1)
    e = eta[..., None]
    d_tail = -np.log(e + (1 - e) * np.exp(-tails))
    d_tail = np.minimum(d_tail, tails)
    nxt = np.concatenate([d_tail[..., 1:], np.zeros_like(d_tail[..., :1])], -1)
    return np.clip(d_tail - nxt, 0.0, alpha)


def _beta_field(rng, sig, rho, size, X, Y):
    """eta[:, x, y] ~ Beta(sigma_x - rho, rho) for 0 <= x <= X, 1 <= y <= Y; y = 0 unused."""
    eta = np.ones((size, X + 1, Y + 1))
    for x in range(X + 1):
        ga = rng.standard_gamma(sig[x] - rho, size=(size, Y))
        gb = rng.standard_gamma(rho, size=(size, Y))
        eta[:, x, 1:] = ga / (ga + gb)
    return eta


def _sigmas(P, n):
    sig = P["sigma"] if isinstance(P["sigma"], (list, tuple)) else [P["sigma"]] * n
    sig = [_real(s) for s in sig]
    if len(sig) < n:
        raise ParameterError("need one sigma per column")
    rho = _real(P["rho"])
    if not 0 < rho < min(sig[:n]):
        raise ParameterError("need 0 < rho < min sigma_x")
    return sig, rho


def continuous_heights(eta: np.ndarray, queries) -> np.ndarray:
    """Heights of the continuous vertex model driven by a given Beta field.

    eta[:, 0, y] sets the mass -log(eta) of color y entering row y from the
    left; eta[:, x, y] for x >= 1 is the splitting variable of vertex (x, y).
    """
    size, X1, Y1 = eta.shape
    X, Y = X1 - 1, Y1 - 1
    rows = np.zeros((size, Y, Y))
    idx = np.arange(Y)
    rows[:, idx, idx] = -np.log(eta[:, 0, 1:])
    out = np.zeros((size, len(queries)))
    by_col: dict = {}
    for j, (k, (a, b)) in enumerate(queries):
        by_col.setdefault(a, []).append((j, k, b))

    def record(a):
        for j, k, b in by_col.get(a, []):
            out[:, j] = rows[:, :b, max(k, 1) - 1:].sum(axis=(1, 2))

    record(0)
    for a in range(1, X + 1):
        up = np.zeros((size, Y))
        for r in range(Y):
            d = split_masses(up, eta[:, a, r + 1])
            up, rows[:, r] = up + rows[:, r] - d, d
        record(a)
    return out


def _continuous_block(cfg: SamplerConfig, size: int, rng) -> np.ndarray:
    P = cfg.params
    X, Y = P["extent"]
    sig, rho = _sigmas(P, X + 1)
    return continuous_heights(_beta_field(rng, sig, rho, size, X, Y), cfg.queries)


# polymers, all in log space

def _polymer_grid_extent(cfg):
    xm = max(int(a) for _, (a, _) in cfg.queries)
    ym = max(int(b) for _, (_, b) in cfg.queries)
    return xm, ym


def _check_polymer_queries(cfg):
    for k, (a, b) in cfg.queries:
        if not all(isinstance(v, int) for v in (k, a, b)) or k < 0 or a < 0:
            raise ParameterError("polymer queries need integer start k >= 0 and end (x, y) with x >= 0")
        if b < k + a:
            raise ParameterError(f"end point {(a, b)} is not reachable from (0, {k}): need y >= k + x")


def _lattice_polymer(cfg: SamplerConfig, size: int, log_vert: np.ndarray, log_diag: np.ndarray) -> np.ndarray:
    """Log partition functions from weights on edges ending at (x, y).

    log_vert[:, x, y] is the vertical edge (x, y-1) -> (x, y); log_diag the
    diagonal edge (x-1, y-1) -> (x, y). Initial diagonal runs from the start
    collect nothing.
    """
    xm, ym = _polymer_grid_extent(cfg)
    out = np.zeros((size, len(cfg.queries)))
    for k in sorted({k for k, _ in cfg.queries}):
        Z = np.full((size, xm + 1, ym + 1), -np.inf)
        for x in range(xm + 1):
            if k + x <= ym:
                Z[:, x, k + x] = 0.0
            for y in range(k + x + 1, ym + 1):
                stay = log_vert[:, x, y] + Z[:, x, y - 1]
                if x == 0:
                    Z[:, x, y] = stay
                else:
                    Z[:, x, y] = np.logaddexp(stay, log_diag[:, x, y] + Z[:, x - 1, y - 1])
        for idx, (kk, (a, b)) in enumerate(cfg.queries):
            if kk == k:
                out[:, idx] = Z[:, a, b]
    return out


def beta_polymer_logz(log_eta: np.ndarray, log_one_minus: np.ndarray, queries) -> np.ndarray:
    """Delayed Beta-polymer log partition functions on a given noise field."""
    size = log_eta.shape[0]
    cfg = SamplerConfig("beta", {}, queries, size, 0)
    return _lattice_polymer(cfg, size, log_eta, log_one_minus)


def _beta_block(cfg: SamplerConfig, size: int, rng) -> np.ndarray:
    xm, ym = _polymer_grid_extent(cfg)
    sig, rho = _sigmas(cfg.params, xm + 1)
    eta = _beta_field(rng, sig, rho, size, xm, ym)
    with np.errstate(divide="ignore"):
        # row y = 0 is a placeholder with eta = 1 and is never read
        return beta_polymer_logz(np.log(eta), np.log1p(-eta), cfg.queries)


def gamma_polymer_logz(log_gamma: np.ndarray, queries) -> np.ndarray:
    size = log_gamma.shape[0]
    cfg = SamplerConfig("gamma", {}, queries, size, 0)
    return _lattice_polymer(cfg, size, log_gamma, np.zeros_like(log_gamma))


def _gamma_block(cfg: SamplerConfig, size: int, rng) -> np.ndarray:
    kappa = _real(cfg.params["kappa"])
    if kappa <= 0:
        raise ParameterError("need kappa > 0")
    xm, ym = _polymer_grid_extent(cfg)
    log_g = np.zeros((size, xm + 1, ym + 1))
    log_g[:, :, 1:] = np.log(rng.standard_gamma(kappa, size=(size, xm + 1, ym)))
    return gamma_polymer_logz(log_g, cfg.queries)


def _grid_index(t, dt: float, what: str) -> int:
    i = round(float(t) / dt)
    if abs(i * dt - float(t)) > 1e-9 * max(1.0, abs(float(t))):
        raise ParameterError(f"{what} = {t} is not on the time grid of step {dt}")
    return i


def brownian_paths(rng, size: int, columns: int, steps: int, dt: float) -> np.ndarray:
    """B_n on the grid, shape (size, columns, steps + 1), starting at 0."""
    inc = rng.normal(0.0, math.sqrt(dt), size=(size, columns, steps))
    B = np.zeros((size, columns, steps + 1))
    np.cumsum(inc, axis=2, out=B[:, :, 1:])
    return B


def _semi_discrete(B: np.ndarray, dt: float, starts, ends, kind: str, delayed: bool) -> np.ndarray:
    """Passage times (kind "blpp") or log partition functions (kind "oy").

    starts[j] = (n', t') and ends[j] = (n, t) with times on the grid. The
    delayed variant does not collect the noise of the starting column.
    """
    size, _, T1 = B.shape
    out = np.zeros((size, len(starts)))
    groups: dict = {}
    for j, (st, en) in enumerate(zip(starts, ends)):
        groups.setdefault((int(st[0]), _grid_index(st[1], dt, "start time")), []).append((j, en))
    for (n0, i0), items in groups.items():
        G = np.full((size, T1), -np.inf)
        G[:, i0:] = 0.0 if delayed else B[:, n0, i0:] - B[:, n0, i0:i0 + 1]
        cols = {n0: G}
        top = max(int(en[0]) for _, en in items)
        for n in range(n0 + 1, top + 1):
            Bn = B[:, n, :]
            f = G - Bn
            if kind == "blpp":
                G = Bn + np.maximum.accumulate(f, axis=1)
            else:
                # cumulative trapezoid of exp(f) in log space
                pair = np.logaddexp(f[:, :-1], f[:, 1:]) + math.log(dt / 2)
                pair[:, :i0] = -np.inf
                cum = np.full((size, T1), -np.inf)
                cum[:, 1:] = np.logaddexp.accumulate(pair, axis=1)
                G = Bn + cum
            cols[n] = G
        for j, (n, t) in items:
            out[:, j] = cols[int(n)][:, _grid_index(t, dt, "end time")]
    return out


def semi_discrete_points(cfg: SamplerConfig):
    """Start and end points of the queries of a BLPP or O'Connell-Yor config."""
    P = cfg.params
    if P.get("direction", "vertical") == "horizontal":
        starts = [(k, 0) for k, _ in cfg.queries]
    else:
        n0 = int(P.get("start_column", 0))
        starts = [(n0, k) for k, _ in cfg.queries]
    return starts, [u for _, u in cfg.queries]


def lpp_from_paths(B: np.ndarray, dt: float, queries, start_column: int = 0, delayed: bool = False) -> np.ndarray:
    """Brownian last passage times from (start_column, k) to (n, t) on a fixed path field."""
    return _semi_discrete(B, dt, [(start_column, k) for k, _ in queries], [u for _, u in queries], "blpp", delayed)


def oy_from_paths(B: np.ndarray, dt: float, queries, start_column: int = 0, delayed: bool = False) -> np.ndarray:
    """Log O'Connell-Yor partition functions from (start_column, k) to (n, t)."""
    return _semi_discrete(B, dt, [(start_column, k) for k, _ in queries], [u for _, u in queries], "oy", delayed)


def _continuum_block(cfg: SamplerConfig, size: int, rng, kind: str, dt=None) -> np.ndarray:
    P = cfg.params
    dt = _real(P["dt"]) if dt is None else dt
    starts, ends = semi_discrete_points(cfg)
    cols = max(int(e[0]) for e in ends) + 1
    steps = _grid_index(max(float(e[1]) for e in ends), dt, "end time")
    B = brownian_paths(rng, size, cols, steps, dt)
    return _semi_discrete(B, dt, starts, ends, kind, bool(P.get("delayed", False)))


def oy_richardson(cfg: SamplerConfig, replicas: int = 2000) -> dict:
    """Discretization check: coupled step-dt and step-dt/2 runs on the same paths.

    Returns the mean and largest mean difference per query, plus the
    Richardson-extrapolated means (2 f(dt/2) - f(dt) for a first-order rule).
    """
    dt = _real(cfg.params["dt"])
    starts, ends = semi_discrete_points(cfg)
    cols = max(int(e[0]) for e in ends) + 1
    steps = _grid_index(max(float(e[1]) for e in ends), dt, "end time")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed).spawn(1)[0]))
    fine = brownian_paths(rng, replicas, cols, 2 * steps, dt / 2)
    delayed = bool(cfg.params.get("delayed", False))
    kind = "blpp" if cfg.model == "blpp" else "oy"
    f_fine = _semi_discrete(fine, dt / 2, starts, ends, kind, delayed)
    f_coarse = _semi_discrete(fine[:, :, ::2], dt, starts, ends, kind, delayed)
    diff = f_fine - f_coarse
    return {"dt": dt, "mean_difference": diff.mean(0).tolist(),
            "max_abs_difference": np.abs(diff).max(0).tolist(),
            "extrapolated_mean": (2 * f_fine.mean(0) - f_coarse.mean(0)).tolist()}


def dt_warning(cfg: SamplerConfig) -> str | None:
    if cfg.model not in ("blpp", "oy"):
        return None
    dt = _real(cfg.params["dt"])
    span = max(float(b) - float(k) for k, (_, b) in cfg.queries)
    if span > 0 and dt > span / 1000:
        return f"dt = {dt} is coarse for time span {span}; expect visible discretization bias"
    return None


# dispatch

def _validate(cfg: SamplerConfig) -> None:
    P = cfg.params
    if cfg.model in VERTEX_MODELS:
        X, Y = P["extent"]
        _check_vertex_queries(cfg, X, Y)
        if cfg.model == "six_vertex" and len(P["y"]) < X:
            raise ParameterError("need one column rapidity per column")
        if cfg.model == "fused" and (len(P["Ms"]) < X or len(P["zs"]) < X):
            raise ParameterError("need M and z for every column")
    elif cfg.model in ("beta", "gamma"):
        _check_polymer_queries(cfg)
    else:
        for st, en in zip(*semi_discrete_points(cfg)):
            if int(en[0]) < int(st[0]) or float(en[1]) < float(st[1]) or float(st[1]) < 0:
                raise ParameterError(f"end {tuple(en)} must lie up-right of the start {tuple(st)}")


def _run_block(cfg: SamplerConfig, size: int, rng) -> np.ndarray:
    m = cfg.model
    if m == "six_vertex":
        return _six_vertex_block(cfg, size, rng)
    if m == "fused":
        return _fused_block(cfg, size, rng)
    if m == "continued":
        return _continued_block(cfg, size, rng)
    if m == "continuous":
        return _continuous_block(cfg, size, rng)
    if m == "beta":
        return _beta_block(cfg, size, rng)
    if m == "gamma":
        return _gamma_block(cfg, size, rng)
    return _continuum_block(cfg, size, rng, m)


def _block_task(args):
    cfg_dict, b, size, ss = args
    cfg = SamplerConfig.from_dict(cfg_dict)
    return b, _run_block(cfg, size, np.random.Generator(np.random.Philox(ss)))


def query_labels(cfg: SamplerConfig) -> list[str]:
    if cfg.model in VERTEX_MODELS:
        return [f"H>={k}@({a},{b})" for k, (a, b) in cfg.queries]
    if cfg.model in ("blpp", "oy"):
        starts, ends = semi_discrete_points(cfg)
        return [f"Z({st[0]},{st[1]})->({en[0]},{en[1]})" for st, en in zip(starts, ends)]
    return [f"logZ(0,{k})->({a},{b})" for k, (a, b) in cfg.queries]


def sample(cfg: SamplerConfig, workers: int = 1) -> SampleBatch:
    """Draw ``cfg.replicas`` replicas of the query vector."""
    _validate(cfg)
    n_blocks = -(-cfg.replicas // BLOCK)
    children = np.random.SeedSequence(cfg.seed).spawn(n_blocks)
    tasks = [(cfg.to_dict(), b, min(BLOCK, cfg.replicas - b * BLOCK), ss) for b, ss in enumerate(children)]
    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = dict(ex.map(_block_task, tasks))
    else:
        parts = dict(_block_task(t) for t in tasks)
    obs = np.concatenate([parts[b] for b in range(n_blocks)], axis=0)
    meta = {"model": cfg.model}
    warn = dt_warning(cfg)
    if warn:
        meta["warning"] = warn
    return SampleBatch(obs, query_labels(cfg), cfg.to_dict(), cfg.seed, BLOCK, meta)


# shift experiments

def _succeq(u, v) -> bool:
    return u[0] <= v[0] and u[1] >= v[1]


def shift_violations(queries, iota: int, delta, model: str = "beta", params=None) -> list[str]:
    """Violated hypotheses of the shift statement, as readable strings."""
    params = params or {}
    n = len(queries)
    if not 1 <= iota <= n:
        return [f"iota = {iota} is not in 1..{n}"]
    problems = []
    horizontal = model in ("blpp", "oy") and params.get("direction", "vertical") == "horizontal"
    if (model not in ("blpp", "oy") or horizontal) and delta != int(delta):
        problems.append("this model shifts by whole lattice steps (integer delta)")
    if model == "six_vertex" and delta not in (0, 1):
        problems.append("the six-vertex shift moves one row at a time (delta = 1)")
    if delta == 0:
        return problems
    ks = [k for k, _ in queries]
    us = [u for _, u in queries]
    ks2, us2 = list(ks), list(us)
    ks2[iota - 1] = ks[iota - 1] + delta
    a, b = us[iota - 1]
    us2[iota - 1] = (a + delta, b) if horizontal else (a, b + delta)
    for tag, kk in (("", ks), ("'", ks2)):
        if kk[0] < 0 or any(kk[i] > kk[i + 1] for i in range(n - 1)):
            problems.append(f"need 0 <= k{tag}_1 <= ... <= k{tag}_n")
    # column shifts reverse the ordering of the end points
    above = (lambda u, v: _succeq(v, u)) if horizontal else _succeq
    word = "down-right" if horizontal else "up-left"
    for tag, uu in (("", us), ("'", us2)):
        c = uu[iota - 1]
        for j in range(n):
            if j < iota - 1 and not above(uu[j], c):
                problems.append(f"need U{tag}_{j + 1} {word} of U{tag}_{iota}")
            if j > iota - 1 and not above(c, uu[j]):
                problems.append(f"need U{tag}_{iota} {word} of U{tag}_{j + 1}")
    if model in VERTEX_MODELS:
        k, (_, b) = queries[iota - 1]
        if k < 1:
            problems.append("the shifted cutoff k_iota must be >= 1")
        if model == "six_vertex" and b + 1 < k:
            problems.append("the shifted point must sit at height b_iota + 1 >= k_iota")
    return problems


def exploratory_reason(cfg: SamplerConfig) -> str | None:
    """Why a precondition-clean run is still outside what is proven, if it is."""
    P = cfg.params
    if cfg.model in ("blpp", "oy") and P.get("direction") == "horizontal" and not P.get("delayed", False):
        return "column shifts are only established for delayed partition functions"
    return None


def shifted_config(cfg: SamplerConfig, iota: int, delta, seed: int, swap: bool = True) -> SamplerConfig:
    qs = list(cfg.queries)
    k, (a, b) = qs[iota - 1]
    if cfg.model in ("blpp", "oy") and cfg.params.get("direction") == "horizontal":
        qs[iota - 1] = (k + delta, (a + delta, b))
    else:
        qs[iota - 1] = (k + delta, (a, b + delta))
    params = dict(cfg.params)
    if cfg.model == "six_vertex" and delta and swap:
        Y = params["extent"][1]
        x = list(params.get("x", [1] * Y))
        p = b + 1
        if p > Y:
            raise ParameterError("extent too small for the shifted point")
        if 1 <= k <= Y:
            x[k - 1], x[p - 1] = x[p - 1], x[k - 1]
        params["x"] = x
    return SamplerConfig(cfg.model, params, qs, cfg.replicas, seed)


def run_shift_experiment(cfg: SamplerConfig, iota: int, delta, force: bool = False,
                         workers: int = 1, swap: bool = True) -> tuple[SampleBatch, SampleBatch, dict]:
    """Sample the original and the shifted query vectors in independent environments.

    ``swap=False`` drops the row-rapidity exchange of the six-vertex shift;
    that comparison is not a valid identity and serves as a negative control.
    """
    problems = shift_violations(cfg.queries, iota, delta, cfg.model, cfg.params)
    if problems and not force:
        raise PreconditionError("; ".join(problems))
    seed_a, seed_b = (int(s.generate_state(1, np.uint64)[0])
                      for s in np.random.SeedSequence(cfg.seed).spawn(2))
    a_cfg = SamplerConfig(cfg.model, cfg.params, cfg.queries, cfg.replicas, seed_a)
    b_cfg = shifted_config(cfg, iota, delta, seed_b, swap)
    reason = exploratory_reason(cfg)
    if not swap and cfg.model == "six_vertex" and delta:
        reason = "negative control: rapidity exchange deliberately skipped"
    info = {"iota": iota, "delta": _jsonable(delta), "violations": problems,
            "exploratory": bool(problems) or reason is not None}
    if reason:
        info["exploratory_reason"] = reason
    return sample(a_cfg, workers), sample(b_cfg, workers), info
