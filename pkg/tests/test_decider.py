import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from syllog.decider import SAT, UNKNOWN, UNSAT, decide_sat, search_assignment
from syllog.formulas import conjuncts, parse, Variable
from syllog.generators import random_formula
from syllog.hfragment import flat_bound
from syllog.normalizer import make_conjunction
from syllog.oracle import brute_force_sat
from syllog.restriction import RestrictionError, is_3lqsr
from syllog.semantics import evaluate

x, y = Variable("x", 0), Variable("y", 0)
X = Variable("X", 1)


def conj(text):
    return make_conjunction(conjuncts(parse(text)))


@pytest.mark.parametrize("method", ["search", "ground"])
@pytest.mark.parametrize("text", ["(forall z)(z in X) & !(x in X)", "X = Y & !(X = Y)"])
def test_unsat_examples(text, method):
    assert decide_sat(parse(text), method=method).status == UNSAT


@pytest.mark.parametrize("method", ["search", "ground"])
def test_sat_witness_checks(method):
    f = parse("(forall Z)(Z in A -> (forall z)(z in Z -> z in X)) & Y in A & y in Y & !(x in X)")
    v = decide_sat(f, method=method)
    assert v.status == SAT
    assert evaluate(v.witness, f)


def test_unlinked_example_outside_fragment():
    # the inner atom does not mention Z, so the link condition fails
    f = parse("(forall Z)(Z in A -> (forall z)(z in Z)) & X in A & !(x in X)")
    with pytest.raises(RestrictionError):
        decide_sat(f)
    assert decide_sat(f, allow_unrestricted=True, max_domain=3).status == UNKNOWN
    assert brute_force_sat(f, 3) == (False, None)


def test_search_assignment_equality():
    M = search_assignment(conj("x = y"), 1)
    assert M.m0[x] == M.m0[y] == 0


def test_search_assignment_pigeonhole():
    psi = conj("!(x = y)")
    assert search_assignment(psi, 1) is None
    M = search_assignment(psi, 2)
    assert (M.m0[x], M.m0[y]) == (0, 1)


def test_search_assignment_universal():
    M = search_assignment(conj("(forall z)(z in X)"), 2)
    assert M.m1[X] == 0b11


def test_search_assignment_rejects_empty_domain():
    with pytest.raises(ValueError):
        search_assignment(conj("x = x"), 0)


def test_unsat_reports_bound():
    v = decide_sat(parse("x in X & !(x in X)"))
    assert v.status == UNSAT and v.bound_used >= 1
    assert v.witness is None


def test_verdict_json_has_no_time():
    doc = decide_sat(parse("x in X")).to_json()
    assert "time" not in doc["stats"]
    assert doc["status"] == SAT and doc["witness"]["domain_size"] >= 1


def _corpus(seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        f = random_formula(rng, depth=2, max_prefix=2)
        if is_3lqsr(f).member:
            out.append(f)
    return out


@pytest.mark.parametrize("f", _corpus(11, 40), ids=lambda f: "")
def test_search_and_ground_agree(f):
    a = decide_sat(f, method="search", max_disjuncts=256)
    b = decide_sat(f, method="ground")
    assert a.status == b.status
    for v in (a, b):
        if v.status == SAT:
            assert evaluate(v.witness, f)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_refined_bound(seed):
    # level-0/1 formulas: no model up to the refined bound means none one size larger either (nor up to 3)
    rng = random.Random(seed)
    f = random_formula(rng, depth=2, max_prefix=2, n_colls=0, level2=False)
    fb = flat_bound(f)
    assert fb["kind"] == "level-1"
    assume(fb["bound"] <= 4)
    found, _ = brute_force_sat(f, max(fb["bound"] + 1, 3))
    small, _ = brute_force_sat(f, fb["bound"])
    assert found == small
