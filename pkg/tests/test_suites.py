from fractions import Fraction

import pytest

from shiftinv import suites, vertexcore
from shiftinv.suites import SUITES, run_suite

FAST = [n for n in SUITES if n not in ("fusion", "recursion")]


@pytest.mark.parametrize("name", FAST)
def test_suite_passes_with_few_trials(name):
    res = run_suite(name, seed=1, trials=3)
    assert res.checked > 0 and res.passed, res.failures[:2]


def test_suites_are_seeded():
    a, b = run_suite("shift", 4, 5), run_suite("shift", 4, 5)
    assert a.checked == b.checked and a.to_dict()["failures"] == b.to_dict()["failures"] == []


def test_failure_records_parameters(monkeypatch):
    orig = vertexcore.r_weight

    def broken(q, z, i, j, k, l):
        w = orig(q, z, i, j, k, l)
        return w + Fraction(1, 100) if (i, j, k, l) == (1, 0, 1, 0) else w

    monkeypatch.setattr(vertexcore, "r_weight", broken)
    res = run_suite("stochasticity", 0, 2)
    assert not res.passed
    assert {"N", "q", "z", "bad_inputs"} <= set(res.failures[0])
    assert isinstance(res.failures[0]["q"], str)


def test_random_quadrant_queries_meet_hypotheses():
    import random
    from shiftinv.latticepf import check_quadrant_preconditions

    rng = random.Random(0)
    for _ in range(20):
        qs, iota = suites.random_quadrant_queries(rng, 3, 4, 3)
        check_quadrant_preconditions(qs, iota)
