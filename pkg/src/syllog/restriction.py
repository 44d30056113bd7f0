"""Membership test for the restricted fragment.

Every level-1 quantified atom ``(forall z1..zn) phi0`` occurring inside a
level-2 atom ``(forall Z1..Zm) phi1`` must be *linked* to the Zj: the
formula ``!phi0 -> AND_i OR_j zi in Zj`` has to be valid.  Validity is
certified either syntactically (``phi0`` is literally ``L -> B`` with
``L`` the link conjunction) or by an exhaustive search over
equality-class abstractions of the quantifier-free condition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .formulas import (
    Atom0Mem, Atom1Eq, Formula, FormulaError, Implies, Not,
    Or, QAtom1, QAtom2, all_vars, conjoin, conjuncts, disjoin,
    disjuncts, render, subformulas,
)
from .semantics import _ev

__all__ = [
    "LinkCondition", "Report", "ReportEntry", "RestrictionError",
    "schema_fast_path", "decide_qf_2ls_validity", "is_3lqsr", "link_conjunction",
    "set_partitions",
]

SCHEMA = "certified-by-schema"
SEARCH = "certified-by-2LS"
VIOLATED = "violated"


class RestrictionError(FormulaError):
    def __init__(self, report: "Report"):
        bad = [e for e in report.entries if e.verdict == VIOLATED]
        super().__init__(
            "formula is outside the restricted fragment: "
            + "; ".join(f"{render(e.link.inner_atom)} is not linked to "
                        f"{', '.join(v.name for v in e.link.outer_bound)}" for e in bad))
        self.report = report


def link_conjunction(zs, Zs) -> Formula:
    return conjoin(disjoin(Atom0Mem(z, Z) for Z in Zs) for z in zs)


@dataclass(frozen=True)
class LinkCondition:
    inner_atom: QAtom1
    outer_bound: tuple

    @property
    def condition(self) -> Formula:
        return Implies(Not(self.inner_atom.body),
                       link_conjunction(self.inner_atom.bound, self.outer_bound))


def _clause_key(f: Formula):
    out = []
    for d in disjuncts(f):
        if type(d) is not Atom0Mem:
            return None
        out.append((d.x, d.X))
    return tuple(sorted(out))


def _conj_key(f: Formula):
    keys = []
    for c in conjuncts(f):
        k = _clause_key(c)
        if k is None:
            return None
        keys.append(k)
    return tuple(sorted(keys))


def schema_fast_path(c: LinkCondition) -> bool:
    """True iff the inner body is ``L -> B`` (or ``!L | B``) where L is
    the link conjunction up to associativity and commutativity."""
    body = c.inner_atom.body
    if type(body) is Implies:
        antecedent = body.left
    elif type(body) is Or and type(body.left) is Not:
        antecedent = body.left.arg
    else:
        return False
    want = _conj_key(link_conjunction(c.inner_atom.bound, c.outer_bound))
    return _conj_key(antecedent) == want


def set_partitions(k: int):
    """Restricted growth strings of length k (one per set partition)."""
    if k == 0:
        yield ()
        return
    def rec(prefix, top):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from rec(prefix, max(top, b))
            prefix.pop()
    yield from rec([0], 0)


def decide_qf_2ls_validity(f: Formula) -> bool:
    """Validity of a quantifier-free formula over sorts 0 and 1.

    A countermodel only needs the images of the individual variables plus
    one separating element per pair of set variables compared by ``=``,
    so we enumerate partitions of the individuals into classes, then all
    memberships of those classes and of the extra anonymous elements.
    """
    vs = all_vars(f)
    for g in subformulas(f):
        if type(g) in (QAtom1, QAtom2):
            raise FormulaError("2LS validity test needs a quantifier-free formula")
    if any(v.sort == 2 for v in vs):
        raise FormulaError("2LS validity test takes no sort-2 variables")
    xs = sorted(v for v in vs if v.sort == 0)
    Xs = sorted(v for v in vs if v.sort == 1)
    pairs = {frozenset((g.X, g.Y)) for g in subformulas(f) if type(g) is Atom1Eq and g.X != g.Y}
    extras = len(pairs)
    neg = Not(f)
    for rgs in set_partitions(len(xs)):
        classes = (max(rgs) + 1) if rgs else 0
        n = max(1, classes + extras)
        e0 = dict(zip(xs, rgs))
        for masks in itertools.product(range(1 << n), repeat=len(Xs)):
            e1 = dict(zip(Xs, masks))
            if _ev(neg, n, e0, e1, {}):
                return False
    return True


@dataclass
class ReportEntry:
    outer_atom: QAtom2
    link: LinkCondition
    verdict: str

    def to_json(self) -> dict:
        return {
            "outer": render(self.outer_atom),
            "outer_bound": [v.name for v in self.outer_atom.bound],
            "inner": render(self.link.inner_atom),
            "condition": render(self.link.condition),
            "verdict": self.verdict,
        }


@dataclass
class Report:
    entries: list = field(default_factory=list)

    @property
    def member(self) -> bool:
        return all(e.verdict != VIOLATED for e in self.entries)

    def violations(self) -> list:
        return [e for e in self.entries if e.verdict == VIOLATED]

    def to_json(self) -> dict:
        return {"member": self.member, "entries": [e.to_json() for e in self.entries]}


def _inner_atoms(body: Formula):
    seen = []
    for g in subformulas(body):
        if type(g) is QAtom1 and g not in seen:
            seen.append(g)
    return seen


def check_link(c: LinkCondition) -> str:
    if schema_fast_path(c):
        return SCHEMA
    return SEARCH if decide_qf_2ls_validity(c.condition) else VIOLATED


def is_3lqsr(f: Formula) -> Report:
    """One entry per (level-2 atom, level-1 atom inside it), in order of
    first occurrence.  Polarity of the occurrence is ignored: the link
    condition is required everywhere."""
    report = Report()
    outers = []
    for g in subformulas(f):
        if type(g) is QAtom2 and g not in outers:
            outers.append(g)
    for q in outers:
        for inner in _inner_atoms(q.body):
            link = LinkCondition(inner, q.bound)
            report.entries.append(ReportEntry(q, link, check_link(link)))
    return report
