import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from syllog.formulas import parse
from syllog.generators import random_formula
from syllog.grounding import ground_model
from syllog.oracle import models
from syllog.sat import Cnf, solve
from syllog.semantics import evaluate


def _brute_cnf(nvars, clauses):
    for bits in itertools.product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.lists(st.lists(st.integers(1, 6), min_size=1, max_size=3), max_size=12),
       st.integers(0, 2**30))
def test_dpll_matches_truth_tables(nvars, raw, signs):
    clauses = [[(v if v <= nvars else nvars) * (1 if signs >> (i * 3 + j) & 1 else -1)
                for j, v in enumerate(c)] for i, c in enumerate(raw)]
    cnf = Cnf(nvars)
    for c in clauses:
        cnf.add_clause(c)
    sol = solve(cnf)
    assert (sol is not None) == _brute_cnf(nvars, clauses)
    if sol is not None:
        assert all(any(sol[abs(l)] == (l > 0) for l in c) for c in clauses)


def test_empty_clause_unsat():
    cnf = Cnf(1)
    cnf.add_clause([])
    assert solve(cnf) is None


@pytest.mark.parametrize("text,n,sat", [
    ("(forall z)(z in X) & !(x in X)", 2, False),
    ("!(x = y)", 1, False),
    ("!(x = y)", 2, True),
    ("(forall Z)(Z in A) & !(X in A)", 2, False),
    ("(forall Z)(Z in A -> (forall z)(z in Z -> z in X)) & Y in A & !(Y = X)", 2, True),
])
def test_ground_examples(text, n, sat):
    f = parse(text)
    M = ground_model(f, n)
    assert (M is not None) == sat
    if M is not None:
        assert evaluate(M, f)


@pytest.mark.parametrize("seed", range(60))
def test_ground_matches_oracle(seed):
    rng = random.Random(seed)
    f = random_formula(rng, depth=2, max_prefix=2)
    for n in (1, 2):
        M = ground_model(f, n)
        expect = next(models(f, n), None) is not None
        assert (M is not None) == expect
        if M is not None:
            assert evaluate(M, f)
