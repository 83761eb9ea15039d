"""Distributional comparisons for sampled observable vectors.

Two samples are compared by binning each coordinate at quantiles of the
pooled sample, forming joint cells, and running a chi-square test of
homogeneity whose p-value comes from label permutations rather than the
asymptotic chi-square law. Mean and variance differences are reported
alongside, in standard-error units, so a failure says where the mismatch is.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy import stats

DEFAULT_LEVEL = 1e-3
MAX_BINS = 8
MIN_CELL = 10
MIN_EXPECTED = 5


@dataclass
class TestReport:
    test: str
    statistic: float
    dof: int
    p_value: float
    level: float
    passed: bool
    n: tuple
    cells: int
    moments: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text)
        return text


def _as_2d(sample) -> np.ndarray:
    a = np.asarray(sample, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] == 0:
        raise ValueError("expected a non-empty (replicas, observables) array")
    if not np.all(np.isfinite(a)):
        raise ValueError("sample contains non-finite values")
    return a


def quantile_edges(pooled: np.ndarray, max_bins: int = MAX_BINS) -> np.ndarray:
    """Interior bin edges at pooled quantiles, deduplicated for atoms."""
    qs = np.linspace(0, 1, max_bins + 1)[1:-1]
    return np.unique(np.quantile(pooled, qs, method="inverted_cdf"))


def joint_cells(a: np.ndarray, b: np.ndarray, max_bins: int = MAX_BINS):
    """Integer cell codes for both samples, using bins fitted on the pooled data."""
    pooled = np.vstack([a, b])
    codes = np.zeros(len(pooled), dtype=np.int64)
    for j in range(pooled.shape[1]):
        edges = quantile_edges(pooled[:, j], max_bins)
        # values equal to an edge land in the lower bin
        idx = np.searchsorted(edges, pooled[:, j], side="left")
        codes = codes * (len(edges) + 1) + idx
    _, codes = np.unique(codes, return_inverse=True)
    return codes[:len(a)], codes[len(a):]


def _merge_sparse(codes: np.ndarray, min_count: int) -> np.ndarray:
    """Send cells with fewer than min_count pooled hits to one reservoir cell."""
    counts = np.bincount(codes)
    sparse = counts < min_count
    if not sparse.any():
        return codes
    keep = np.flatnonzero(~sparse)
    remap = np.full(len(counts), len(keep), dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    return remap[codes]


def _chi2_from_counts(ca: np.ndarray, cb: np.ndarray) -> float:
    tot = ca + cb
    n_a, n_b = ca.sum(), cb.sum()
    ea = tot * (n_a / (n_a + n_b))
    eb = tot * (n_b / (n_a + n_b))
    return float(((ca - ea) ** 2 / ea).sum() + ((cb - eb) ** 2 / eb).sum())


def _chi2_homogeneity(codes: np.ndarray, labels: np.ndarray, k: int) -> float:
    cb = np.bincount(codes[labels], minlength=k).astype(float)
    tot = np.bincount(codes, minlength=k).astype(float)
    return _chi2_from_counts(tot - cb, cb)


def permutation_statistics(tot: np.ndarray, n_b: int, permutations: int, rng) -> np.ndarray:
    """Chi-square statistics under random relabelling of the pooled sample.

    Relabelling only matters through the per-cell counts of sample B, whose
    law given the cell totals is multivariate hypergeometric, so those counts
    are drawn directly instead of shuffling every observation.
    """
    cb = rng.multivariate_hypergeometric(tot.astype(np.int64), n_b, size=permutations).astype(float)
    ca = tot - cb
    n = tot.sum()
    ea = tot * ((n - n_b) / n)
    eb = tot * (n_b / n)
    return (((ca - ea) ** 2 / ea).sum(axis=1) + ((cb - eb) ** 2 / eb).sum(axis=1))


def moment_deltas(a: np.ndarray, b: np.ndarray, labels=None) -> list[dict]:
    """Mean and variance differences per coordinate, in standard-error units."""
    out = []
    for j in range(a.shape[1]):
        x, y = a[:, j], b[:, j]
        row = {"label": labels[j] if labels else str(j)}
        se = math.sqrt(x.var(ddof=1) / len(x) + y.var(ddof=1) / len(y)) if min(len(x), len(y)) > 1 else 0.0
        d = float(y.mean() - x.mean())
        row.update(mean_a=float(x.mean()), mean_b=float(y.mean()), mean_delta=d,
                   mean_z=d / se if se > 0 else (0.0 if d == 0 else math.inf))
        va, vb = x.var(ddof=1), y.var(ddof=1)
        sva, svb = jackknife_se(x, _var), jackknife_se(y, _var)
        s = math.hypot(sva, svb)
        dv = float(vb - va)
        row.update(var_a=float(va), var_b=float(vb), var_delta=dv,
                   var_z=dv / s if s > 0 else (0.0 if dv == 0 else math.inf))
        out.append(row)
    for j in range(a.shape[1]):
        for l in range(j + 1, a.shape[1]):
            xa, xb = a[:, [j, l]], b[:, [j, l]]
            ca, cb = _cov(xa), _cov(xb)
            s = math.hypot(jackknife_se(xa, _cov), jackknife_se(xb, _cov))
            dc = cb - ca
            name = f"{labels[j]}*{labels[l]}" if labels else f"{j}*{l}"
            out.append({"label": name, "cov_a": ca, "cov_b": cb, "cov_delta": dc,
                        "cov_z": dc / s if s > 0 else (0.0 if dc == 0 else math.inf)})
    return out


def max_moment_z(moments: list[dict]) -> float:
    """Largest |delta| / standard error across means, variances and covariances."""
    zs = [abs(r[k]) for r in moments for k in ("mean_z", "var_z", "cov_z") if k in r]
    return max(zs, default=0.0)


def _cov(x: np.ndarray) -> float:
    return float(np.cov(x[:, 0], x[:, 1])[0, 1])


def _var(x: np.ndarray) -> float:
    return float(x.var(ddof=1))


def jackknife_se(x: np.ndarray, stat, groups: int = 50) -> float:
    """Grouped jackknife standard error of a statistic."""
    n = len(x)
    g = min(groups, n)
    if g < 2:
        return 0.0
    parts = np.array_split(np.arange(n), g)
    mask = np.ones(n, dtype=bool)
    vals = []
    for p in parts:
        mask[p] = False
        vals.append(stat(x[mask]))
        mask[p] = True
    vals = np.asarray(vals)
    return float(math.sqrt((g - 1) / g * ((vals - vals.mean()) ** 2).sum()))


def default_permutations(level: float) -> int:
    """At least 999, and enough that the smallest attainable p-value is below ``level``."""
    return max(999, math.ceil(2 / level) - 1)


def two_sample_joint_test(a, b, level: float = DEFAULT_LEVEL, permutations: int | None = None,
                          seed: int = 0, labels=None, max_bins: int = MAX_BINS) -> TestReport:
    """Test that two samples of observable vectors share one joint law.

    The permutation p-value is (hits + 1) / (permutations + 1), so it never
    drops below 1 / (permutations + 1); the default count keeps that floor
    at half the level.
    """
    if permutations is None:
        permutations = default_permutations(level)
    a, b = _as_2d(a), _as_2d(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError("samples observe different numbers of coordinates")
    if permutations < 99:
        raise ValueError("use at least 99 permutations")
    ca, cb = joint_cells(a, b, max_bins)
    codes = _merge_sparse(np.concatenate([ca, cb]), MIN_CELL)
    k = int(codes.max()) + 1
    lab = np.zeros(len(codes), dtype=bool)
    lab[len(ca):] = True
    notes = []
    if 1 / (permutations + 1) >= level:
        notes.append(f"{permutations} permutations cannot produce a p-value below the level {level}")
    if k < 2:
        notes.append("all mass in one cell; the joint test carries no information")
        obs, p = 0.0, 1.0
    else:
        obs = _chi2_homogeneity(codes, lab, k)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        tot = np.bincount(codes, minlength=k)
        perm = permutation_statistics(tot, int(lab.sum()), permutations, rng)
        hits = int((perm >= obs - 1e-9 * max(1.0, obs)).sum())
        p = (hits + 1) / (permutations + 1)
    return TestReport("two-sample joint chi-square (permutation)", obs, max(k - 1, 0), p, level,
                      bool(p >= level), (len(a), len(b)), k, moment_deltas(a, b, labels), notes)


def exact_vs_empirical_test(exact: Mapping[tuple, float], sample, level: float = DEFAULT_LEVEL) -> TestReport:
    """Chi-square goodness of fit of sampled integer vectors against an exact law.

    Outcomes with expected count below MIN_EXPECTED are pooled together
    with any outcome that the exact law does not list.
    """
    s = _as_2d(sample)
    n = len(s)
    probs = {tuple(int(v) for v in k): float(p) for k, p in exact.items()}
    total = sum(probs.values())
    if abs(total - 1) > 1e-9:
        raise ValueError(f"exact law has mass {total}")
    observed: dict = {}
    for row in s.astype(np.int64):
        key = tuple(int(v) for v in row)
        observed[key] = observed.get(key, 0) + 1
    big = [k for k, p in probs.items() if p * n >= MIN_EXPECTED]
    obs_v = [observed.get(k, 0) for k in big]
    exp_v = [probs[k] * n for k in big]
    rest_o = n - sum(obs_v)
    rest_e = n - sum(exp_v)
    notes = []
    if rest_e > 1e-9 * n or rest_o:
        obs_v.append(rest_o)
        exp_v.append(max(rest_e, 1e-300))
        notes.append(f"{len(probs) - len(big)} rare outcomes pooled")
    stray = sum(c for k, c in observed.items() if k not in probs)
    if stray:
        notes.append(f"{stray} draws outside the support of the exact law")
    obs_v, exp_v = np.asarray(obs_v, float), np.asarray(exp_v, float)
    stat = float(((obs_v - exp_v) ** 2 / exp_v).sum())
    dof = len(obs_v) - 1
    p = float(stats.chi2.sf(stat, dof)) if dof > 0 else 1.0
    if stray:
        p = 0.0
    return TestReport("exact vs empirical chi-square", stat, dof, p, level, bool(p >= level),
                      (n,), len(obs_v), [], notes)


def mean_vs_reference(sample, reference: float, level: float = DEFAULT_LEVEL) -> TestReport:
    """Two-sided z-test of a sample mean against a known value."""
    x = np.asarray(sample, dtype=float).ravel()
    se = x.std(ddof=1) / math.sqrt(len(x))
    z = (x.mean() - reference) / se
    p = float(2 * stats.norm.sf(abs(z)))
    return TestReport("mean z-test", float(z), 0, p, level, bool(p >= level), (len(x),), 0,
                      [{"mean": float(x.mean()), "reference": float(reference), "se": float(se)}], [])
