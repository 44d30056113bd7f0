import itertools

import pytest

from syllog.formulas import Atom0Eq, Not, QAtom1, QAtom2, Variable, free_vars, parse
from syllog.normalizer import (
    ResourceLimitError, eliminate_negative_quantified, literal_type, make_conjunction, normalize,
    to_dnf,
)
from syllog.oracle import models
from syllog.restriction import RestrictionError
from syllog.semantics import evaluate, rebind

a, b, c, d = (Variable(n, 0) for n in "abcd")


def lits(text):
    return Atom0Eq(*(Variable(n.strip(), 0) for n in text.split("=")))


def test_dnf_distributes():
    f = parse("a = b & (b = c | c = d)")
    assert to_dnf(f) == [(lits("a=b"), lits("b=c")), (lits("a=b"), lits("c=d"))]


def test_dnf_single_literal():
    assert to_dnf(parse("a = b")) == [(lits("a=b"),)]


def test_dnf_de_morgan():
    assert to_dnf(parse("!(a = b & c = d)")) == [(Not(lits("a=b")),), (Not(lits("c=d")),)]


def test_dnf_drops_complementary():
    assert to_dnf(parse("a = b & !(a = b)")) == []


def test_dnf_cap():
    f = parse("(a = b | a = c) & (b = c | b = d) & (c = d | a = d)")
    with pytest.raises(ResourceLimitError):
        to_dnf(f, max_disjuncts=4)


def test_negated_universal_gets_fresh_witness():
    out = eliminate_negative_quantified([parse("!((forall z)(z in X))")])
    assert [c.render() for c in out] == ["!(z#1 in X)"]


def test_no_negated_quantifier_unchanged():
    lit = parse("x in X")
    out = eliminate_negative_quantified([lit])
    assert [c.literals for c in out] == [(lit,)]


def test_negated_universal_conjunction_splits():
    out = eliminate_negative_quantified([parse("!((forall z)(z in X & z in Y))")])
    assert sorted(c.render() for c in out) == ["!(z#1 in X)", "!(z#1 in Y)"]


def test_normalize_flat():
    out = normalize(parse("x in X"))
    assert len(out) == 1
    assert [literal_type(l) for l in out[0].literals] == [1]
    assert out[0].phi_set == ()


def test_normalize_collects_phi():
    # outside the restricted fragment (the inner atom is not linked), so the check is off
    out = normalize(parse("(forall Z)(Z in A -> (forall z)(z in Z))"), check=False)
    assert len(out) == 1
    (lit,) = out[0].literals
    assert type(lit) is QAtom2 and literal_type(lit) == 3
    assert [e.to_json() for e in out[0].phi_set] == [{"atom": "(forall z)(z in Z)", "arguments": ["Z"]}]


def test_normalize_requires_fragment_by_default():
    with pytest.raises(RestrictionError):
        normalize(parse("(forall Z)(Z in A -> (forall z)(z in Z))"))


def test_normalize_disjunction_with_negated_universal():
    out = normalize(parse("!((forall z)(z in X)) | X = Y"))
    assert sorted(c.render() for c in out) == ["!(z#1 in X)", "X = Y"]


def test_normal_form_shape():
    f = parse("!((forall Z)(Z in A <-> (forall z)(z in Z -> z in X))) | (x in X & !(X in A))")
    for conj in normalize(f):
        for l in conj.literals:
            assert literal_type(l) in (1, 2, 3)
            assert not (type(l) is Not and type(l.arg) in (QAtom1, QAtom2))


def test_make_conjunction_rejects_non_literals():
    with pytest.raises(Exception):
        make_conjunction([parse("x in X | y in X")])


@pytest.mark.parametrize("text", [
    "!((forall z)(z in X)) | X = Y",
    "(forall z)(z in X) & !((forall z)(z in X & z in Y))",
    "!((forall Z)(Z in A -> (forall z)(z in Z -> z in X))) & X in A",
    "(x in X <-> y in X) & !(x = y)",
])
def test_equisatisfiable_by_size(text):
    f = parse(text)
    conjs = normalize(f)
    for n in (1, 2):
        lhs = next(models(f, n), None) is not None
        rhs = any(next(models(c.formula(), n), None) is not None for c in conjs)
        assert lhs == rhs


def test_every_conjunction_implies_formula():
    # witnesses are extra free variables; the input's own variables missing
    # from a conjunction are unconstrained, so every value must work
    f = parse("!((forall z)(z in X)) | (forall z)(z in Y -> z in X)")
    fv = sorted(free_vars(f))
    for conj in normalize(f):
        for n in (1, 2):
            for M in models(conj.formula(), n, first_only=False):
                missing = [v for v in fv if not M.assigns(v)]
                for vals in itertools.product(range(1 << n), repeat=len(missing)):
                    assert evaluate(rebind(M, dict(zip(missing, vals))), f)
