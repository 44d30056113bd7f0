"""Reduction of arbitrary formulas to normalized conjunctions.

A normalized conjunction is a list of literals of three kinds:

1. flat literals: ``x = y``, ``x in X``, ``X = Y``, ``X in A`` and their
   negations;
2. positive level-1 quantified atoms;
3. positive level-2 quantified atoms.

Negated quantified atoms are removed by substituting fresh free
variables for the bound ones, after which the exposed body is pushed
back through DNF; this repeats until no negated quantified literal is
left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .formulas import (
    FLAT_ATOMS, Atom0Eq, Atom1Eq, And, Formula, FormulaError, FreshNames, Iff,
    Implies, Not, Or, QAtom1, QAtom2, VarInventory, conjoin, inventory,
    rename_apart, render, substitute, subformulas,
)
from .restriction import RestrictionError, is_3lqsr

__all__ = [
    "ResourceLimitError", "NormalizedConjunction", "to_dnf",
    "eliminate_negative_quantified", "normalize", "iter_normalize",
    "literal_type", "make_conjunction",
]


class ResourceLimitError(RuntimeError):
    pass


def literal_type(lit: Formula) -> int:
    t = type(lit)
    if t in FLAT_ATOMS or (t is Not and type(lit.arg) in FLAT_ATOMS):
        return 1
    if t is QAtom1:
        return 2
    if t is QAtom2:
        return 3
    raise FormulaError(f"not a normalized literal: {render(lit)}")


@dataclass(frozen=True)
class PhiEntry:
    atom: QAtom1
    args: tuple  # bound variables of the enclosing level-2 literal

    def to_json(self):
        return {"atom": render(self.atom), "arguments": [v.name for v in self.args]}


@dataclass(frozen=True)
class NormalizedConjunction:
    literals: tuple
    phi_set: tuple = ()
    inventory: VarInventory = field(default=None, compare=False)

    @property
    def flat(self) -> list:
        return [l for l in self.literals if literal_type(l) == 1]

    @property
    def level1(self) -> list:
        return [l for l in self.literals if type(l) is QAtom1]

    @property
    def level2(self) -> list:
        return [l for l in self.literals if type(l) is QAtom2]

    def formula(self) -> Formula:
        return conjoin(self.literals)

    @property
    def max_m(self) -> int:
        return max((len(l.bound) for l in self.level2), default=0)

    @property
    def max_n(self) -> int:
        return max((len(e.atom.bound) for e in self.phi_set), default=0)

    def without_level2(self) -> "NormalizedConjunction":
        return make_conjunction([l for l in self.literals if type(l) is not QAtom2])

    def render(self) -> str:
        return render(self.formula())

    def to_json(self) -> dict:
        return {
            "literals": [render(l) for l in self.literals],
            "types": [literal_type(l) for l in self.literals],
            "phi": [e.to_json() for e in self.phi_set],
            "inventory": self.inventory.to_json(),
        }


def make_conjunction(literals) -> NormalizedConjunction:
    lits = tuple(dict.fromkeys(literals))
    for l in lits:
        literal_type(l)
    phi = []
    for l in lits:
        if type(l) is QAtom2:
            for g in subformulas(l.body):
                if type(g) is QAtom1:
                    e = PhiEntry(g, l.bound)
                    if e not in phi:
                        phi.append(e)
    inv = inventory(conjoin(lits)) if lits else VarInventory(*(frozenset(),) * 5)
    return NormalizedConjunction(lits, tuple(phi), inv)


# ---------------------------------------------------------------------------
# DNF with quantified atoms treated as opaque letters

def _neg(lit: Formula) -> Formula:
    return lit.arg if type(lit) is Not else Not(lit)


def _trivially_false(lit: Formula) -> bool:
    if type(lit) is Not:
        a = lit.arg
        return (type(a) is Atom0Eq and a.x == a.y) or (type(a) is Atom1Eq and a.X == a.Y)
    return False


def _merge(a: tuple, b: tuple):
    seen = dict.fromkeys(a)
    for lit in b:
        if _neg(lit) in seen:
            return None
        seen[lit] = None
    return tuple(seen)


class _Dnf:
    def __init__(self, cap):
        self.cap = cap

    def check(self, out):
        if self.cap is not None and len(out) > self.cap:
            raise ResourceLimitError(f"DNF exceeds {self.cap} disjuncts")
        return out

    def run(self, f: Formula, pos: bool = True) -> list:
        t = type(f)
        if t is Not:
            return self.run(f.arg, not pos)
        if t is Implies:
            return self.run(Or(Not(f.left), f.right), pos)
        if t is Iff:
            if pos:
                return self.run(And(Or(Not(f.left), f.right), Or(f.left, Not(f.right))), True)
            return self.run(Or(And(f.left, Not(f.right)), And(Not(f.left), f.right)), True)
        if (t is And and pos) or (t is Or and not pos):
            left = self.run(f.left, pos)
            if not left:
                return []
            right = self.run(f.right, pos)
            out = {}
            for a in left:
                for b in right:
                    m = _merge(a, b)
                    if m is not None:
                        out.setdefault(m, None)
                        self.check(out)
            return list(out)
        if t in (And, Or):
            out = dict.fromkeys(self.run(f.left, pos))
            for c in self.run(f.right, pos):
                out.setdefault(c, None)
            return self.check(list(out))
        lit = f if pos else Not(f)
        if _trivially_false(lit):
            return []
        return [(lit,)]


def to_dnf(f: Formula, max_disjuncts: int | None = None) -> list[tuple]:
    """Disjuncts as tuples of literals; quantified atoms stay opaque.

    Duplicate literals are merged and conjunctions holding a literal
    together with its negation (or ``!(v = v)``) are dropped.
    """
    return _Dnf(max_disjuncts).run(f, True)


def eliminate_negative_quantified(conj, fresh: FreshNames | None = None,
                                  max_disjuncts: int | None = None) -> list:
    """Replace every negated quantified literal by its negated body with
    fresh free variables in place of the bound ones, re-normalizing until
    no such literal remains."""
    conj = tuple(conj)
    if fresh is None:
        fresh = FreshNames()
        for l in conj:
            fresh.reserve_formula(l)
    return list(_elim(conj, fresh, max_disjuncts))


def _elim(conj: tuple, fresh: FreshNames, cap) -> Iterator[NormalizedConjunction]:
    idx = next((i for i, l in enumerate(conj)
                if type(l) is Not and type(l.arg) in (QAtom1, QAtom2)), None)
    if idx is None:
        yield make_conjunction(conj)
        return
    q = conj[idx].arg
    mapping = {v: fresh.variable(v.name, v.sort) for v in q.bound}
    exposed = Not(substitute(q.body, mapping))
    rest = conj[:idx] + conj[idx + 1:]
    for d in to_dnf(exposed, cap):
        merged = _merge(rest, d)
        if merged is None:
            continue
        yield from _elim(merged, fresh, cap)


def iter_normalize(f: Formula, check: bool = True, max_disjuncts: int | None = None,
                   fresh: FreshNames | None = None) -> Iterator[NormalizedConjunction]:
    if check:
        report = is_3lqsr(f)
        if not report.member:
            raise RestrictionError(report)
    fresh = fresh or FreshNames.for_formula(f)
    g = rename_apart(f, fresh)
    count = 0
    for conj in to_dnf(g, max_disjuncts):
        for nc in _elim(conj, fresh, max_disjuncts):
            count += 1
            if max_disjuncts is not None and count > max_disjuncts:
                raise ResourceLimitError(f"normalization exceeds {max_disjuncts} conjunctions")
            yield nc


def normalize(f: Formula, check: bool = True, max_disjuncts: int | None = None) -> list[NormalizedConjunction]:
    """Equisatisfiable list of normalized conjunctions (their disjunction)."""
    return list(iter_normalize(f, check, max_disjuncts))
