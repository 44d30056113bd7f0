"""Propositional encoding of a formula over a fixed finite domain.

Used by the bounded-prefix decider: for a domain {0..n-1} every free
individual becomes a one-hot row of letters, every free set a row of
membership bits, and every free collection one letter per admissible
subset.  Quantifiers are expanded into finite conjunctions.  With a
recognized bounded-prefix report, collections only get letters for
subsets of fewer than h elements and level-2 quantifiers only range
over those subsets (every level-2 atom is guarded by ``Z in A_pi``).
"""

from __future__ import annotations

import itertools

from .formulas import (
    Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, And, Formula, Iff, Implies, Not, Or,
    QAtom1, QAtom2, conjuncts, free_vars,
)
from .restriction import VIOLATED, LinkCondition, check_link
from .sat import Cnf, mk_and, mk_not, mk_or, solve
from .semantics import Interpretation

__all__ = ["Grounding", "ground_model"]


def _popcount(m: int) -> int:
    return bin(m).count("1")


class Grounding:
    def __init__(self, f: Formula, n: int, report=None, pin: bool = True):
        if n < 1:
            raise ValueError("domain size must be positive")
        self.f, self.n = f, n
        self.h = report.h if report is not None else None
        self.a_pi = report.a_pi if report is not None else None
        self.skip = set()
        if report is not None:
            self.skip = {report.xi_pi, *report.psi.values()}
        nsub = 1 << n
        self.subsets = [U for U in range(nsub) if self.h is None or _popcount(U) < self.h]
        self.allowed = set(self.subsets)
        self.cnf = Cnf()
        fv = sorted(free_vars(f))
        self.e0 = {x: [self.cnf.new_var() for _ in range(n)] for x in fv if x.sort == 0}
        self.e1 = {X: [self.cnf.new_var() for _ in range(n)] for X in fv if X.sort == 1}
        self.e2 = {A: {U: self.cnf.new_var() for U in self.subsets}
                   for A in fv if A.sort == 2 and A != self.a_pi}
        self._cache: dict = {}
        self._links: dict = {}
        for row in self.e0.values():
            self.cnf.add_clause(row)
            for i, j in itertools.combinations(row, 2):
                self.cnf.add_clause([-i, -j])
        if pin and self.e0:
            # domain elements are interchangeable, so the first individual may sit at 0
            self.cnf.add_clause([next(iter(self.e0.values()))[0]])

    # -- helpers ------------------------------------------------------------

    def _define(self, key, build):
        """A literal equivalent to the expression ``build()``, cached."""
        if key in self._cache:
            return self._cache[key]
        e = build()
        if e is True or e is False or isinstance(e, int):
            lit = e
        else:
            lit = self.cnf.new_var()
            self.cnf.assert_formula(mk_or([-lit, e]))
            self.cnf.assert_formula(mk_or([lit, mk_not(e)]))
        self._cache[key] = lit
        return lit

    def _elem(self, x, env0):
        return ("c", env0[x]) if x in env0 else ("v", self.e0[x])

    def _set(self, X, env1):
        return ("c", env1[X]) if X in env1 else ("v", self.e1[X])

    def _coll_letter(self, A, U):
        if A == self.a_pi:
            return U in self.allowed
        return self.e2[A].get(U, False)

    def _set_is(self, X, U):
        row = self.e1[X]
        return self._define(("is", X, U), lambda: mk_and(
            [row[d] if U >> d & 1 else -row[d] for d in range(self.n)]))

    # -- grounding ----------------------------------------------------------

    def encode(self, g: Formula, env0: dict, env1: dict, union=None):
        t = type(g)
        n = self.n
        if t is Atom0Eq:
            kx, x = self._elem(g.x, env0)
            ky, y = self._elem(g.y, env0)
            if kx == "c" and ky == "c":
                return x == y
            if g.x == g.y:
                return True
            if kx == "c":
                return y[x]
            if ky == "c":
                return x[y]
            key = ("eq0",) + tuple(sorted((g.x, g.y)))
            return self._define(key, lambda: mk_or([mk_and([x[d], y[d]]) for d in range(n)]))
        if t is Atom0Mem:
            kx, x = self._elem(g.x, env0)
            kX, X = self._set(g.X, env1)
            if kx == "c" and kX == "c":
                return bool(X >> x & 1)
            if kx == "c":
                return X[x]
            if kX == "c":
                return mk_or([x[d] for d in range(n) if X >> d & 1])
            return self._define(("mem0", g.x, g.X),
                                lambda: mk_or([mk_and([x[d], X[d]]) for d in range(n)]))
        if t is Atom1Eq:
            kX, X = self._set(g.X, env1)
            kY, Y = self._set(g.Y, env1)
            if kX == "c" and kY == "c":
                return X == Y
            if kX == "c":
                return self._set_is(g.Y, X)
            if kY == "c":
                return self._set_is(g.X, Y)
            if g.X == g.Y:
                return True
            key = ("eq1",) + tuple(sorted((g.X, g.Y)))
            return self._define(key, lambda: mk_and(
                [mk_or([mk_and([X[d], Y[d]]), mk_and([-X[d], -Y[d]])]) for d in range(n)]))
        if t is Atom1Mem:
            if g.X in env1:
                return self._coll_letter(g.A, env1[g.X])
            return self._define(("mem1", g.X, g.A), lambda: mk_or(
                [mk_and([self._set_is(g.X, U), self._coll_letter(g.A, U)]) for U in self.subsets]))
        if t is Not:
            return mk_not(self.encode(g.arg, env0, env1, union))
        if t is And:
            return mk_and([self.encode(g.left, env0, env1, union), self.encode(g.right, env0, env1, union)])
        if t is Or:
            return mk_or([self.encode(g.left, env0, env1, union), self.encode(g.right, env0, env1, union)])
        if t is Implies:
            return mk_or([mk_not(self.encode(g.left, env0, env1, union)),
                          self.encode(g.right, env0, env1, union)])
        if t is Iff:
            a = self._lit(self.encode(g.left, env0, env1, union))
            b = self._lit(self.encode(g.right, env0, env1, union))
            return mk_or([mk_and([a, b]), mk_and([mk_not(a), mk_not(b)])])
        if t is QAtom1:
            dom = range(n)
            if union is not None and self._links.get(g, False):
                dom = [d for d in range(n) if union >> d & 1]
            e0 = dict(env0)
            parts = []
            for tup in itertools.product(dom, repeat=len(g.bound)):
                e0.update(zip(g.bound, tup))
                r = self.encode(g.body, e0, env1)
                if r is False:
                    return False
                parts.append(r)
            return mk_and(parts)
        if t is QAtom2:
            self._certify(g)
            e1 = dict(env1)
            parts = []
            for tup in itertools.product(self.subsets if self._guarded(g) else range(1 << n),
                                         repeat=len(g.bound)):
                e1.update(zip(g.bound, tup))
                u = 0
                for U in tup:
                    u |= U
                r = self.encode(g.body, env0, e1, u)
                if r is False:
                    return False
                parts.append(r)
            return mk_and(parts)
        raise TypeError(f"unexpected formula node {t.__name__}")

    def _lit(self, e):
        if e is True or e is False or isinstance(e, int):
            return e
        v = self.cnf.new_var()
        self.cnf.assert_formula(mk_or([-v, e]))
        self.cnf.assert_formula(mk_or([v, mk_not(e)]))
        return v

    def _guarded(self, g: QAtom2) -> bool:
        if self.h is None:
            return False
        body = g.body
        if type(body) is not Implies:
            return False
        guard = conjuncts(body.left)
        return sorted((a.X, a.A) if type(a) is Atom1Mem else (None, None) for a in guard) == \
            sorted((Z, self.a_pi) for Z in g.bound)

    def _certify(self, g: QAtom2):
        from .formulas import subformulas
        for s in subformulas(g.body):
            if type(s) is QAtom1 and s not in self._links:
                self._links[s] = check_link(LinkCondition(s, g.bound)) != VIOLATED

    # -- driving ------------------------------------------------------------

    def build(self) -> Cnf:
        for g in conjuncts(self.f):
            if g in self.skip:
                continue
            self.cnf.assert_formula(self.encode(g, {}, {}))
        return self.cnf

    def decode(self, sol: dict) -> Interpretation:
        n = self.n
        m0 = {x: next(d for d in range(n) if sol.get(row[d], False)) for x, row in self.e0.items()}
        m1 = {X: sum(1 << d for d in range(n) if sol.get(row[d], False)) for X, row in self.e1.items()}
        m2 = {A: frozenset(U for U, v in row.items() if sol.get(v, False)) for A, row in self.e2.items()}
        if self.a_pi is not None and self.a_pi in free_vars(self.f):
            m2[self.a_pi] = frozenset(self.subsets)
        return Interpretation(n, m0, m1, m2)


def ground_model(f: Formula, n: int, report=None, stats: dict | None = None):
    """A model of f over {0..n-1}, or None.  With a bounded-prefix report
    collections are confined to subsets of fewer than h elements."""
    g = Grounding(f, n, report)
    cnf = g.build()
    if stats is not None:
        stats["clauses"] = stats.get("clauses", 0) + len(cnf.clauses)
        stats["sat_calls"] = stats.get("sat_calls", 0) + 1
    if cnf.empty:
        return None
    sol = solve(cnf)
    if sol is None:
        return None
    return g.decode(sol)
