import pytest
from hypothesis import given, settings, strategies as st

from syllog.formulas import Variable, parse
from syllog.hfragment import xi_pi
from syllog.restriction import (
    SCHEMA, SEARCH, VIOLATED, LinkCondition, decide_qf_2ls_validity, is_3lqsr, schema_fast_path,
    set_partitions,
)

Z, Z2 = Variable("Z", 1), Variable("Z2", 1)


def link(text, *outer):
    return LinkCondition(parse(text), tuple(outer))


def test_fast_path_subset_schema():
    assert schema_fast_path(link("(forall z)(z in Z -> z in X)", Z))


def test_fast_path_bounded_cardinality_schema():
    q = xi_pi(Variable("A", 2), 3)
    inner = q.body.right
    assert schema_fast_path(LinkCondition(inner, q.bound))


def test_fast_path_undetermined_when_antecedent_differs():
    assert not schema_fast_path(link("(forall z)(z in X -> z in Z)", Z))


def test_fast_path_commutes_over_conjunction_order():
    c = link("(forall z1 z2)(z2 in Z & z1 in Z -> z1 = z2)", Z)
    assert schema_fast_path(c)


def test_2ls_validity_examples():
    assert decide_qf_2ls_validity(parse("x = x"))
    assert decide_qf_2ls_validity(link("(forall z)(z in Z -> z in X)", Z).condition)
    assert not decide_qf_2ls_validity(parse("x in X -> y in X"))
    assert decide_qf_2ls_validity(parse("X = Y & x in X -> x in Y"))
    assert not decide_qf_2ls_validity(parse("X = Y | !(x in X)"))


def test_powerset_formula_certified_by_schema():
    rep = is_3lqsr(parse("(forall Z)(Z in A <-> (forall z)(z in Z -> z in X))"))
    assert rep.member
    assert [e.verdict for e in rep.entries] == [SCHEMA]


def test_unlinked_inner_atom_violated():
    rep = is_3lqsr(parse("(forall Z)(Z in A <-> (forall z)(z in X -> z in Y))"))
    assert not rep.member
    assert rep.entries[0].verdict == VIOLATED


def test_quantifier_free_member_vacuously():
    rep = is_3lqsr(parse("x in X & !(X = Y) | X in A"))
    assert rep.member and rep.entries == []


def test_certified_by_2ls_path():
    # valid link condition that is not syntactically the schema
    rep = is_3lqsr(parse("(forall Z)(Z in A -> (forall z)(z in X | !(z in Z) | z in X))"))
    assert rep.member
    assert rep.entries[0].verdict == SEARCH


def test_negated_occurrence_still_checked():
    rep = is_3lqsr(parse("(forall Z)(Z in A -> !((forall z)(z in X)))"))
    assert not rep.member


def test_report_json():
    doc = is_3lqsr(parse("(forall Z)(Z in A <-> (forall z)(z in Z -> z in X))")).to_json()
    assert doc["member"] is True
    assert doc["entries"][0]["outer_bound"] == ["Z"]


@pytest.mark.parametrize("k,count", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_set_partitions_bell_numbers(k, count):
    assert len(list(set_partitions(k))) == count


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_fast_path_never_contradicts_decider(seed):
    import random
    from syllog.generators import random_linked_atom
    rng = random.Random(seed)
    outer = (Z, Z2)[:rng.randint(1, 2)]
    atom = random_linked_atom(rng, outer, [Variable("x", 0)], [Variable("X", 1)])
    c = LinkCondition(atom, outer)
    if schema_fast_path(c):
        assert decide_qf_2ls_validity(c.condition)
