import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiftinv.stattest import (exact_vs_empirical_test, jackknife_se, joint_cells, max_moment_z,
                               mean_vs_reference, moment_deltas, quantile_edges,
                               two_sample_joint_test)


def rng(seed):
    return np.random.default_rng(seed)


def test_identical_batches_accept_with_zero_statistic():
    a = rng(0).standard_normal((2000, 3))
    rep = two_sample_joint_test(a, a.copy(), permutations=199)
    assert rep.statistic == 0 and rep.passed and rep.p_value == 1.0
    assert max_moment_z(rep.moments) == 0
    assert all(r.get("mean_delta", 0) == 0 for r in rep.moments)


def test_report_fields_and_json(tmp_path):
    r = rng(1)
    rep = two_sample_joint_test(r.standard_normal((500, 2)), r.standard_normal((500, 2)),
                                permutations=99, labels=["u", "v"])
    assert 0 < rep.p_value <= 1 and rep.passed == (rep.p_value >= rep.level)
    assert [m["label"] for m in rep.moments] == ["u", "v", "u*v"]
    rep.to_json(tmp_path / "r.json")
    assert json.loads((tmp_path / "r.json").read_text())["n"] == [500, 500]


def test_mean_shift_is_rejected():
    r = rng(2)
    rep = two_sample_joint_test(r.standard_normal((10_000, 1)), 0.5 + r.standard_normal((10_000, 1)))
    assert not rep.passed and rep.p_value == 1 / 2000
    assert abs(rep.moments[0]["mean_z"]) > 20


def test_permutation_floor_sits_below_level():
    r = rng(7)
    a, b = r.standard_normal((200, 1)), r.standard_normal((200, 1))
    rep = two_sample_joint_test(a, b, level=1e-3, permutations=999)
    assert any("cannot produce" in n for n in rep.notes)
    assert not two_sample_joint_test(a, b, level=0.05, permutations=999).notes


def test_variance_change_is_flagged_by_moments():
    r = rng(3)
    rep = two_sample_joint_test(r.standard_normal((5000, 1)), 1.3 * r.standard_normal((5000, 1)),
                                permutations=99)
    assert abs(rep.moments[0]["var_z"]) > 4


def test_calibration_small():
    # same generator, split seeds: p-values should not pile up near zero
    ps = []
    for s in range(40):
        ss = np.random.SeedSequence(s).spawn(2)
        a = np.random.default_rng(ss[0]).standard_normal((1000, 3))
        b = np.random.default_rng(ss[1]).standard_normal((1000, 3))
        ps.append(two_sample_joint_test(a, b, permutations=99, seed=s).p_value)
    assert sum(p < 1e-3 for p in ps) == 0
    assert 0.3 < np.mean(ps) < 0.7


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_p_value_invariant_under_monotone_transform(seed):
    r = rng(seed)
    a = r.exponential(size=(400, 2))
    b = r.exponential(size=(400, 2)) * 1.05
    p1 = two_sample_joint_test(a, b, permutations=99, seed=seed).p_value
    p2 = two_sample_joint_test(np.log(a), np.log(b), permutations=99, seed=seed).p_value
    assert p1 == p2


@given(st.integers(0, 10 ** 6), st.integers(1, 8))
def test_quantile_bins(seed, bins):
    x = rng(seed).integers(0, 5, size=300).astype(float)
    edges = quantile_edges(x, bins)
    assert len(edges) <= bins - 1 and np.all(np.diff(edges) > 0)
    ca, cb = joint_cells(x[:150, None], x[150:, None], bins)
    assert len(ca) == len(cb) == 150


def test_input_errors():
    with pytest.raises(ValueError):
        two_sample_joint_test(np.zeros((0, 2)), np.zeros((5, 2)))
    with pytest.raises(ValueError):
        two_sample_joint_test(np.zeros((5, 2)), np.zeros((5, 3)))
    with pytest.raises(ValueError):
        two_sample_joint_test(np.zeros((5, 1)), np.zeros((5, 1)), permutations=10)
    with pytest.raises(ValueError):
        two_sample_joint_test(np.array([[np.nan]]), np.zeros((5, 1)))


def test_constant_samples_carry_no_information():
    rep = two_sample_joint_test(np.ones((50, 2)), np.ones((60, 2)), permutations=99)
    assert rep.passed and rep.notes


def test_jackknife_matches_textbook_se_of_mean():
    x = rng(4).standard_normal(5000)
    se = jackknife_se(x, np.mean, groups=5000)
    assert se == pytest.approx(x.std(ddof=1) / np.sqrt(len(x)), rel=1e-9)


def test_moment_deltas_shapes():
    r = rng(5)
    m = moment_deltas(r.standard_normal((300, 3)), r.standard_normal((300, 3)))
    assert len(m) == 3 + 3
    assert all("cov_z" in row for row in m[3:])


def test_exact_point_mass():
    rep = exact_vs_empirical_test({(2, 1): 1.0}, np.tile([2, 1], (100, 1)))
    assert rep.passed


def test_fair_die_calibration_and_biased_power():
    law = {(k,): 1 / 6 for k in range(1, 7)}
    ps = [exact_vs_empirical_test(law, rng(s).integers(1, 7, size=(6000, 1))).p_value for s in range(200)]
    assert 3 <= sum(p < 0.05 for p in ps) <= 19
    biased = rng(9).choice(np.arange(1, 7), p=[0.2, 0.16, 0.16, 0.16, 0.16, 0.16], size=(60_000, 1))
    assert not exact_vs_empirical_test(law, biased).passed


def test_exact_test_flags_outcomes_outside_support():
    rep = exact_vs_empirical_test({(0,): 0.5, (1,): 0.5}, np.array([[0]] * 50 + [[1]] * 49 + [[7]]))
    assert not rep.passed and any("outside" in n for n in rep.notes)
    with pytest.raises(ValueError):
        exact_vs_empirical_test({(0,): 0.4}, np.zeros((5, 1)))


def test_mean_vs_reference():
    x = rng(6).beta(2, 3, size=50_000)
    assert mean_vs_reference(x, 0.4).passed
    assert not mean_vs_reference(x, 0.41).passed
