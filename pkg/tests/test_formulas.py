import pytest

from syllog.formulas import (
    And, Atom0Eq, Atom0Mem, Atom1Eq, FormulaError, NestingError, Not, ParseError, QAtom1, QAtom2,
    SortError, Variable, free_vars, inventory, parse, parse_document, rename_apart, render,
    render_document,
)

z, x, y = Variable("z", 0), Variable("x", 0), Variable("y", 0)
X, Y, Z = Variable("X", 1), Variable("Y", 1), Variable("Z", 1)
A = Variable("A", 2)


def test_parse_universal_atom():
    assert parse("(forall z)(z in X)") == QAtom1((z,), Atom0Mem(z, X))


def test_parse_contradiction():
    assert parse("X = Y & !(X = Y)") == And(Atom1Eq(X, Y), Not(Atom1Eq(X, Y)))


def test_nested_level2_rejected():
    with pytest.raises(NestingError):
        parse("(forall Z)((forall Y2)(Y2 in A))")


def test_render_examples():
    assert render(QAtom1((z,), Atom0Mem(z, X))) == "(forall z)(z in X)"
    assert render(Atom0Eq(x, y)) == "x = y"
    assert render(And(Atom0Eq(x, y), Atom0Mem(x, X))) == "(x = y & x in X)"


@pytest.mark.parametrize("text", [
    "(forall z)(z in X)",
    "x in X & !(y in X) | X = Y",
    "(forall Z)(Z in A <-> (forall z)(z in Z -> z in X))",
    "(forall z1 z2)(z1 in X & z2 in X -> z1 = z2)",
    "!(!(x = y)) <-> (X in A -> Y in A)",
])
def test_round_trip(text):
    f = parse(text)
    assert parse(render(f)) == f
    g, _ = parse_document(render_document(f))
    assert g == f


def test_header_declares_sorts():
    f, sorts = parse_document("sort0 a ; sort1 B ; sort2 ; formula: a in B")
    assert f == Atom0Mem(Variable("a", 0), Variable("B", 1))
    assert sorts["B"] == Variable("B", 1)


def test_header_undeclared_identifier():
    with pytest.raises(SortError):
        parse_document("sort0 a ; formula: a in B")


def test_inference_from_membership():
    f = parse("X in Q")
    assert Variable("Q", 2) in free_vars(f)


def test_ill_sorted():
    with pytest.raises(SortError):
        parse("x in x")
    with pytest.raises(SortError):
        parse("(forall z Z)(z in Z)")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse("(forall z)(z in")
    assert "1:" in str(e.value)
    with pytest.raises(ParseError):
        parse("x in X )")


def test_rename_apart_second_binder():
    f = rename_apart(parse("(forall z)(z in X) & (forall z)(z in Y)"))
    assert render(f) == "((forall z)(z in X) & (forall z#1)(z#1 in Y))"


def test_rename_apart_identity():
    f = parse("(forall z)(z in X) & (forall w)(w in Y)")
    assert rename_apart(f) == f


def test_rename_apart_bound_clashing_with_free():
    f = rename_apart(parse("x in X & (forall x)(x = x)"))
    assert render(f) == "(x in X & (forall x#1)(x#1 = x#1))"
    assert Variable("x", 0) in free_vars(f)


def test_fresh_names_reparse():
    f = rename_apart(parse("(forall z)(z in X) & (forall z)(z in Y)"))
    assert parse(render_document(f)) == f


def test_inventory_examples():
    inv = inventory(parse("x in X"))
    assert inv.free0 == {x} and inv.free1 == {X} and not inv.free2
    inv = inventory(parse("(forall Z)(Z in A)"))
    assert inv.bound1 == {Z} and inv.free2 == {A} and not inv.free1


def test_variable_validation():
    with pytest.raises(FormulaError):
        Variable("", 0)
    with pytest.raises(SortError):
        Variable("x", 3)
    assert sorted([Variable("b", 0), Variable("a", 1)])[0].name == "a"


def test_qatom2_rejects_nested_level2():
    with pytest.raises(NestingError):
        QAtom2((Z,), QAtom2((Variable("W", 1),), Atom0Eq(x, x)))
