"""Random formulas and interpretations for property testing.

Everything takes a ``random.Random`` so runs are reproducible from a
seed.  Formulas stay within the restricted fragment by construction:
level-1 atoms placed under a level-2 quantifier always get a body of the
form ``L -> B`` with L the link conjunction, or a body whose link
condition was checked valid.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formulas import (
    Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, And, Formula, Iff, Implies, Not, Or,
    QAtom1, QAtom2, Variable, conjoin, free_vars, rename_apart,
)
from .normalizer import make_conjunction
from .restriction import LinkCondition, check_link, is_3lqsr, link_conjunction, VIOLATED
from .semantics import Interpretation, _ev, evaluate

__all__ = [
    "Pools", "random_level0", "random_linked_atom", "random_formula",
    "random_interpretation", "random_model_and_conjunction", "random_h_formula", "DEFAULT_POOLS",
]


@dataclass(frozen=True)
class Pools:
    x: tuple = (Variable("x", 0), Variable("y", 0))
    X: tuple = (Variable("X", 1), Variable("Y", 1))
    A: tuple = (Variable("A", 2), Variable("B", 2))
    z: tuple = (Variable("z1", 0), Variable("z2", 0))
    Z: tuple = (Variable("Z1", 1), Variable("Z2", 1))


DEFAULT_POOLS = Pools()


def _combine(rng: random.Random, atoms, depth: int) -> Formula:
    if depth <= 0 or rng.random() < 0.35:
        a = rng.choice(atoms)()
        return Not(a) if rng.random() < 0.3 else a
    op = rng.choice((And, Or, Implies, Iff, Not))
    if op is Not:
        return Not(_combine(rng, atoms, depth - 1))
    return op(_combine(rng, atoms, depth - 1), _combine(rng, atoms, depth - 1))


def random_level0(rng, ind, sets, depth: int = 2) -> Formula:
    """Propositional combination of ``a = b`` and ``a in S``."""
    atoms = []
    if ind:
        atoms.append(lambda: Atom0Eq(rng.choice(ind), rng.choice(ind)))
        if sets:
            atoms.append(lambda: Atom0Mem(rng.choice(ind), rng.choice(sets)))
            atoms.append(lambda: Atom0Mem(rng.choice(ind), rng.choice(sets)))
    return _combine(rng, atoms, depth)


def random_linked_atom(rng, outer, free_ind, free_sets, max_prefix: int = 2) -> QAtom1:
    """A level-1 atom linked to the outer bound set variables."""
    k = rng.randint(1, max_prefix)
    zs = DEFAULT_POOLS.z[:k]
    sets = list(outer) + list(free_sets)
    rest = random_level0(rng, list(zs) + list(free_ind), sets, depth=1)
    style = rng.random()
    if style < 0.6:
        L = link_conjunction(zs, rng.sample(list(outer), len(outer)))
        body = Implies(L, rest) if rng.random() < 0.7 else Or(Not(L), rest)
        return QAtom1(zs, body)
    for _ in range(20):
        body = random_level0(rng, list(zs) + list(free_ind), sets, depth=2)
        atom = QAtom1(zs, body)
        if check_link(LinkCondition(atom, tuple(outer))) != VIOLATED:
            return atom
    L = link_conjunction(zs, outer)
    return QAtom1(zs, Implies(L, rest))


def _level1_body(rng, outer, ind, sets, colls, depth, max_prefix):
    allsets = list(outer) + list(sets)
    atoms = [lambda: Atom1Mem(rng.choice(outer), rng.choice(colls)) if colls else
             Atom1Eq(rng.choice(outer), rng.choice(allsets))]
    atoms.append(lambda: random_linked_atom(rng, outer, ind, sets, max_prefix))
    atoms.append(lambda: Atom1Eq(rng.choice(outer), rng.choice(allsets)))
    if ind:
        atoms.append(lambda: Atom0Mem(rng.choice(ind), rng.choice(allsets)))
    if colls:
        atoms.append(lambda: Atom1Mem(rng.choice(allsets), rng.choice(colls)))
    return _combine(rng, atoms, depth)


def random_formula(rng: random.Random, pools: Pools = DEFAULT_POOLS, depth: int = 2,
                   max_prefix: int = 2, n_ind: int | None = None, n_sets: int | None = None,
                   n_colls: int | None = None, level2: bool = True) -> Formula:
    """Random formula of the restricted fragment with at most two free
    variables per sort and quantifier prefixes of length at most
    ``max_prefix``."""
    ind = list(pools.x[:rng.randint(0, 2) if n_ind is None else n_ind])
    sets = list(pools.X[:rng.randint(0, 2) if n_sets is None else n_sets])
    colls = list(pools.A[:rng.randint(0, 2) if n_colls is None else n_colls])
    if not ind and not sets:
        ind = [pools.x[0]]

    def flat():
        choices = []
        if ind:
            choices.append(lambda: Atom0Eq(rng.choice(ind), rng.choice(ind)))
        if ind and sets:
            choices.append(lambda: Atom0Mem(rng.choice(ind), rng.choice(sets)))
        if sets:
            choices.append(lambda: Atom1Eq(rng.choice(sets), rng.choice(sets)))
        if sets and colls:
            choices.append(lambda: Atom1Mem(rng.choice(sets), rng.choice(colls)))
        return rng.choice(choices)()

    def q1():
        k = rng.randint(1, max_prefix)
        zs = pools.z[:k]
        return QAtom1(zs, random_level0(rng, list(zs) + ind, sets, depth=2) if sets or ind
                      else Atom0Eq(zs[0], zs[-1]))

    def q2():
        m = rng.randint(1, max_prefix)
        outer = pools.Z[:m]
        return QAtom2(outer, _level1_body(rng, outer, ind, sets, colls, 2, max_prefix))

    atoms = [flat, flat, q1]
    if level2:
        atoms.append(q2)
    f = _combine(rng, atoms, depth)
    return rename_apart(f)


def random_interpretation(rng: random.Random, n: int, vars0=(), vars1=(), vars2=(),
                          density: float = 0.5) -> Interpretation:
    nsub = 1 << n
    m0 = {x: rng.randrange(n) for x in vars0}
    m1 = {X: rng.randrange(nsub) for X in vars1}
    m2 = {}
    for A in vars2:
        coll = set()
        for U in range(nsub):
            if rng.random() < density * (4 / max(4, nsub)) * 2:
                coll.add(U)
        for X in vars1:
            if rng.random() < 0.5:
                coll.add(m1[X])
        m2[A] = frozenset(coll)
    return Interpretation(n, m0, m1, m2)


# ---------------------------------------------------------------------------
# models paired with normalized conjunctions they satisfy

def _truth_on_subsets(phi, n, outer, e0, e1, e2):
    """All tuples of subsets (over the outer variables) satisfying phi."""
    import itertools
    out = []
    env1 = dict(e1)
    for tup in itertools.product(range(1 << n), repeat=len(outer)):
        for Z, U in zip(outer, tup):
            env1[Z] = U
        if _ev(phi, n, e0, env1, e2):
            out.append(tup)
    return out


def random_model_and_conjunction(rng: random.Random, max_n: int = 6, pools: Pools = DEFAULT_POOLS,
                                 max_prefix: int = 2):
    """A finite interpretation M and a normalized conjunction psi of the
    restricted fragment (at most two free variables per sort) with M
    satisfying psi.  Level-2 literals are chosen first and the
    collections are then fitted to make them true."""
    n = rng.randint(1, max_n)
    ind = list(pools.x[:rng.randint(0, 2)])
    sets = list(pools.X[:rng.randint(1, 2)])
    colls = list(pools.A[:rng.randint(0, 2)])
    M = random_interpretation(rng, n, ind, sets, colls)
    e0, e1 = dict(M.m0), dict(M.m1)
    e2 = {A: set(c) for A, c in M.m2.items()}
    fixed: set = set()
    literals = []
    nsub = 1 << n

    for _ in range(rng.randint(0, 2)):
        free_colls = [A for A in colls if A not in fixed]
        template = rng.choice(["imp", "def", "close", "plain"])
        m = 1 if template in ("imp", "def") else rng.randint(1, max_prefix)
        if n > 4 and m == 2 and rng.random() < 0.5:
            m = 1
        outer = pools.Z[:m]
        usable = sorted(fixed)
        body = _level1_body(rng, outer, ind, sets, usable, 1, max_prefix)
        frozen = {A: frozenset(e2[A]) for A in e2}
        if template in ("imp", "def") and free_colls:
            A = rng.choice(free_colls)
            good = {tup[0] for tup in _truth_on_subsets(body, n, outer, e0, e1, frozen)}
            if template == "def":
                e2[A] = set(good)
                lit = QAtom2(outer, Iff(Atom1Mem(outer[0], A), body))
            else:
                e2[A] = {U for U in good if rng.random() < 0.5}
                lit = QAtom2(outer, Implies(Atom1Mem(outer[0], A), body))
            fixed.add(A)
        elif template == "close" and len(outer) == 2 and free_colls and len(colls) == 2:
            B = rng.choice(free_colls)
            A = next(c for c in colls if c != B)
            fixed.add(A)
            frozen = {C: frozenset(e2[C]) for C in e2}
            guard = And(Atom1Mem(outer[0], A), body)
            for tup in _truth_on_subsets(guard, n, outer, e0, e1, frozen):
                e2[B].add(tup[1])
            fixed.add(B)
            lit = QAtom2(outer, Implies(guard, Atom1Mem(outer[1], B)))
        else:
            for C in colls:
                fixed.add(C)
            frozen = {C: frozenset(e2[C]) for C in e2}
            if len(_truth_on_subsets(body, n, outer, e0, e1, frozen)) != nsub ** len(outer):
                continue
            lit = QAtom2(outer, body)
        literals.append(lit)
    fixed.update(colls)
    M = Interpretation(n, e0, e1, {A: frozenset(c) for A, c in e2.items()})

    for _ in range(rng.randint(0, 2)):
        k = rng.randint(1, max_prefix)
        zs = pools.z[:k]
        for _ in range(6):
            atom = QAtom1(zs, random_level0(rng, list(zs) + ind, sets, depth=2))
            if evaluate(M, atom):
                literals.append(atom)
                break

    flats = []
    if ind:
        flats.append(lambda: Atom0Eq(rng.choice(ind), rng.choice(ind)))
        flats.append(lambda: Atom0Mem(rng.choice(ind), rng.choice(sets)))
    flats.append(lambda: Atom1Eq(rng.choice(sets), rng.choice(sets)))
    if colls:
        flats.append(lambda: Atom1Mem(rng.choice(sets), rng.choice(colls)))
    for _ in range(rng.randint(1 if not literals else 0, 3)):
        a = rng.choice(flats)()
        literals.append(a if evaluate(M, a) else Not(a))

    psi_formula = rename_apart(conjoin(literals))
    from .formulas import conjuncts
    psi = make_conjunction(conjuncts(psi_formula))
    M = M.restrict(free_vars(psi_formula))
    assert evaluate(M, psi.formula()), "generator produced a non-model"
    assert is_3lqsr(psi.formula()).member
    return M, psi


def random_h_formula(rng: random.Random, h: int = 2, depth: int = 2, pools: Pools = DEFAULT_POOLS,
                     tries: int = 50) -> Formula:
    """Random formula of the bounded-prefix shape: the universe and A_pi
    conjuncts, a confinement conjunct per collection, and a chi part whose
    level-2 atoms are guarded by membership in A_pi."""
    from .hfragment import psi_confine, recognize_h, xi_pi, xi_universe

    XU, A_pi = Variable("X_U", 1), Variable("A_pi", 2)
    for _ in range(tries):
        ind = list(pools.x[:rng.randint(1, 2)])
        sets = list(pools.X[:rng.randint(0, 2)])
        colls = list(pools.A[:rng.randint(0, 2)])
        k = min(2, h)

        def flat():
            choices = [lambda: Atom0Eq(rng.choice(ind), rng.choice(ind))]
            if sets:
                choices.append(lambda: Atom0Mem(rng.choice(ind), rng.choice(sets)))
                choices.append(lambda: Atom1Eq(rng.choice(sets), rng.choice(sets)))
            if sets and colls:
                choices.append(lambda: Atom1Mem(rng.choice(sets), rng.choice(colls)))
            return rng.choice(choices)()

        def q1():
            zs = pools.z[:rng.randint(1, k)]
            return QAtom1(zs, random_level0(rng, list(zs) + ind, sets, depth=1))

        def q2():
            outer = pools.Z[:rng.randint(1, k)]
            guard = conjoin(Atom1Mem(Z, A_pi) for Z in outer)
            body = _level1_body(rng, outer, ind, sets, colls, 1, k)
            return QAtom2(outer, Implies(guard, body))

        chi = _combine(rng, [flat, flat, q1, q2], depth)
        parts = [xi_universe(XU), xi_pi(A_pi, h)]
        parts += [psi_confine(A, A_pi) for A in sorted(free_vars(chi) | set(colls)) if A.sort == 2 and A != A_pi]
        parts.append(chi)
        f = rename_apart(conjoin(parts))
        if recognize_h(f, h).shape_ok:
            return f
    raise RuntimeError("could not draw a bounded-prefix formula")
