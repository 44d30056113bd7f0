import pytest

from syllog.selftest import SUITES, mutated_relativize, run_suites, suite_relativization


def test_green_path_small_budget():
    results = run_suites(seed=0, budget=40)
    assert [r.name for r in results] == list(SUITES)
    for r in results:
        assert r.ok, (r.name, r.examples)


def test_oracle_suites_get_reduced_budget():
    rs = {r.name: r for r in run_suites(seed=1, budget=50, names=["rebind_individuals", "decider_oracle"])}
    assert rs["rebind_individuals"].cases == 50
    assert rs["decider_oracle"].cases == 10


def test_mutation_canary():
    r = suite_relativization(seed=0, count=300, relativize_fn=mutated_relativize)
    assert r.failures > 0 and not r.ok
    assert r.examples


@pytest.mark.parametrize("seed", [0, 7])
def test_seed_reproducible(seed):
    a = [r.to_json() for r in run_suites(seed=seed, budget=15, names=["relativization", "bound"])]
    b = [r.to_json() for r in run_suites(seed=seed, budget=15, names=["relativization", "bound"])]
    assert a == b
