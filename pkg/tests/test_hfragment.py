import itertools
import random

import pytest

from syllog.decider import SAT, UNSAT, decide_sat, decide_sat_h
from syllog.formulas import Atom0Eq, Variable, conjoin, conjuncts, free_vars, parse, render, size
from syllog.generators import random_h_formula
from syllog.hfragment import (
    ShapeError, flat_bound, flatten_h, propositional_reduction, psi_confine, recognize_h,
    xi_pi, xi_universe,
)
from syllog.oracle import brute_force_sat
from syllog.s5 import parse_modal, translate_s5
from syllog.semantics import evaluate, rebind

x = Variable("x", 0)
XU, A_pi, B = Variable("X_U", 1), Variable("A_pi", 2), Variable("B", 2)


def minimal(chi, h=2):
    return conjoin([xi_universe(XU), xi_pi(A_pi, h), chi])


def test_minimal_shape():
    rep = recognize_h(minimal(Atom0Eq(x, x)), 2)
    assert rep.shape_ok and rep.a_pi == A_pi and rep.universe == XU


def test_minimal_sat_at_one():
    v = decide_sat_h(minimal(Atom0Eq(x, x)), 2)
    assert v.status == SAT and v.witness.domain_size == 1


@pytest.mark.parametrize("text", ["[]p -> p", "<>p & <>~p", "p & <>~p"])
def test_s5_bundle_recognized(text):
    f = translate_s5(parse_modal(text)).formula()
    assert recognize_h(f, 3).shape_ok


def test_missing_xi_pi():
    f = conjoin([xi_universe(XU), Atom0Eq(x, x)])
    rep = recognize_h(f, 2)
    assert not rep.shape_ok and rep.violations
    with pytest.raises(ShapeError):
        decide_sat_h(f, 2)


def test_unguarded_level2_atom():
    f = minimal(parse("(forall Z)(Z in B)"))
    rep = recognize_h(f, 2)
    assert not rep.shape_ok
    assert any("guarded" in m for m in rep.violations)


def test_missing_confinement():
    f = minimal(parse("X in B"))
    assert not recognize_h(f, 2).shape_ok
    assert recognize_h(conjoin([f, psi_confine(B, A_pi)]), 2).shape_ok


def test_h_below_two_rejected():
    with pytest.raises(ValueError):
        recognize_h(minimal(Atom0Eq(x, x)), 1)


def _sets(f):
    return [[render(g) for g in hs.formulas] for hs in flatten_h(f)]


def test_flatten_conjunction():
    assert _sets(parse("x in X & y in Y")) == [["x in X", "y in Y"]]


def test_flatten_double_negation():
    assert _sets(parse("!!(x in X)")) == [["x in X"]]


def test_flatten_negated_universal_gets_fresh_individual():
    out = list(flatten_h(parse("!((forall z)(z in X))")))
    assert [render(g) for g in out[0].formulas] == ["!(z#1 in X)"]
    assert [v.name for v in out[0].fresh0] == ["z#1"]


def test_flatten_disjunction_branches():
    assert _sets(parse("x in X | y in Y")) == [["x in X"], ["y in Y"]]


def _corpus(seed, count):
    rng = random.Random(seed)
    return [random_h_formula(rng, h=2) for _ in range(count)]


@pytest.mark.parametrize("f", _corpus(5, 15), ids=lambda f: "")
def test_branch_implies_formula(f):
    # any model of a branch (taken from the decider) satisfies the input
    for hs in itertools.islice(flatten_h(f, 2), 8):
        v = decide_sat(hs.formula(), method="ground", max_domain=4, allow_unrestricted=True)
        if v.status == SAT:
            # variables the branch dropped may take any value
            M = v.witness
            extra = [(w, (0, 0, frozenset())[w.sort]) for w in free_vars(f) if not M.assigns(w)]
            assert evaluate(rebind(M, extra), f)


@pytest.mark.parametrize("f", _corpus(6, 15), ids=lambda f: "")
def test_branch_and_ground_agree(f):
    if flat_bound(f)["bound"] > 12:
        pytest.skip("too large for the branch search")
    a = decide_sat_h(f, 2, method="ground")
    b = decide_sat_h(f, 2, method="branch", max_branches=4096)
    assert a.status == b.status
    if a.status == SAT:
        assert evaluate(a.witness, f)


@pytest.mark.parametrize("f", _corpus(7, 20), ids=lambda f: "")
def test_flatten_size_linear(f):
    n = size(f)
    for hs in itertools.islice(flatten_h(f, 2), 64):
        assert hs.size() <= 4 * n


def _cnf_sat(clauses):
    letters = sorted({abs(l) for c in clauses for l in c})
    for bits in itertools.product((False, True), repeat=len(letters)):
        val = dict(zip(letters, bits))
        if all(any(val[abs(l)] == (l > 0) for l in c) for c in clauses):
            return True
    return False


@pytest.mark.parametrize("clauses", [
    [[1, 2], [-1], [-2, 3]],
    [[1], [-1]],
    [[1, 2], [-1, 2], [1, -2], [-1, -2]],
    [[1, -2, 3], [-3]],
    [],
])
def test_propositional_reduction(clauses):
    f = propositional_reduction(clauses)
    assert recognize_h(f, 2).shape_ok
    want = SAT if _cnf_sat(clauses) else UNSAT
    assert decide_sat_h(f, 2).status == want
    assert brute_force_sat(f, 1)[0] == (want == SAT)


def test_chi_conjuncts_kept():
    f = minimal(parse("x in X & !(x = x) | x in X"))
    rep = recognize_h(f, 2)
    assert rep.shape_ok and len(rep.chi) == len(conjuncts(f)) - 2
