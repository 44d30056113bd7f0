"""The bounded-prefix sublanguage with collections confined below pow_<h.

A formula of this shape is a conjunction

    xi_U & xi_pi & psi_1 & ... & psi_p & chi

where ``xi_U = (forall z)(z in X_U)`` names the universe,
``xi_pi`` defines ``A_pi`` as the subsets of fewer than h elements,
each ``psi_i = (forall Z)(Z in A_i -> Z in A_pi)`` confines one
collection variable, and chi uses prefixes of length at most h with
every level-2 atom guarded by ``Z_j in A_pi``.

``flatten_h`` rewrites such a formula into sets of literals by the
rules: drop double negation (R1), split conjunctions (R2), branch on
disjunctions (R3), and witness negated level-1 (R4) or level-2 (R5)
quantifiers by fresh free variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .formulas import (
    FLAT_ATOMS, Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, And, Formula, FormulaError,
    FreshNames, Iff, Implies, Not, Or, QAtom1, QAtom2, Variable, all_vars,
    conjoin, conjuncts, disjoin, disjuncts, free_vars, render, size, substitute,
    subformulas,
)
from .restriction import is_3lqsr

__all__ = [
    "HFragmentReport", "HSet", "ShapeError", "recognize_h", "flatten_h",
    "xi_universe", "xi_pi", "psi_confine", "propositional_reduction",
    "branch_bound", "flat_bound",
]


class ShapeError(FormulaError):
    def __init__(self, report: "HFragmentReport"):
        super().__init__("not of the bounded-prefix shape: " + "; ".join(report.violations))
        self.report = report


# ---------------------------------------------------------------------------
# builders for the fixed conjuncts

def xi_universe(XU: Variable, z: Variable | None = None) -> QAtom1:
    z = z or Variable("z", 0)
    return QAtom1((z,), Atom0Mem(z, XU))


def xi_pi(A: Variable, h: int, Z: Variable | None = None, zs=None) -> QAtom2:
    """``A`` is the collection of subsets with fewer than h elements."""
    if h < 2:
        raise ValueError("h must be at least 2")
    Z = Z or Variable("Z", 1)
    zs = tuple(zs or (Variable(f"z{i}", 0) for i in range(1, h + 1)))
    inside = conjoin(Atom0Mem(z, Z) for z in zs)
    clash = disjoin(Atom0Eq(zs[i], zs[j]) for i in range(h) for j in range(i + 1, h))
    return QAtom2((Z,), Iff(Atom1Mem(Z, A), QAtom1(zs, Implies(inside, clash))))


def psi_confine(A: Variable, A_pi: Variable, Z: Variable | None = None) -> QAtom2:
    Z = Z or Variable("Z", 1)
    return QAtom2((Z,), Implies(Atom1Mem(Z, A), Atom1Mem(Z, A_pi)))


# ---------------------------------------------------------------------------
# recognition

@dataclass
class HFragmentReport:
    h: int
    shape_ok: bool = False
    xi_U: Formula | None = None
    universe: Variable | None = None
    xi_pi: Formula | None = None
    a_pi: Variable | None = None
    psi: dict = field(default_factory=dict)
    chi: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "shape_ok": self.shape_ok,
            "xi_U": render(self.xi_U) if self.xi_U is not None else None,
            "universe": self.universe.name if self.universe else None,
            "xi_pi": render(self.xi_pi) if self.xi_pi is not None else None,
            "A_pi": self.a_pi.name if self.a_pi else None,
            "psi": {A.name: render(f) for A, f in sorted(self.psi.items())},
            "chi": [render(f) for f in self.chi],
            "violations": list(self.violations),
        }


def _match_universe(f):
    if type(f) is QAtom1 and len(f.bound) == 1 and type(f.body) is Atom0Mem \
            and f.body.x == f.bound[0]:
        return f.body.X
    return None


def _same_pair(a: Atom0Eq, x, y) -> bool:
    return {a.x, a.y} == {x, y} and a.x != a.y


def _match_xi_pi(f, h):
    """Return A_pi if f is xi_pi for this h (up to AC and renaming)."""
    if type(f) is not QAtom2 or len(f.bound) != 1 or type(f.body) is not Iff:
        return None
    Z = f.bound[0]
    left, right = f.body.left, f.body.right
    if type(left) is not Atom1Mem or left.X != Z:
        left, right = right, left
    if type(left) is not Atom1Mem or left.X != Z or type(right) is not QAtom1:
        return None
    zs = right.bound
    if len(zs) != h or len(set(zs)) != h:
        return None
    body = right.body
    if type(body) is Implies:
        ante, cons = body.left, body.right
    elif type(body) is Or and type(body.left) is Not:
        ante, cons = body.left.arg, body.right
    else:
        return None
    mem = conjuncts(ante)
    if sorted((type(a).__name__, getattr(a, "x", None), getattr(a, "X", None)) for a in mem) != \
            sorted(("Atom0Mem", z, Z) for z in zs):
        return None
    eqs = disjuncts(cons)
    want = {frozenset((zs[i], zs[j])) for i in range(h) for j in range(i + 1, h)}
    if len(eqs) != len(want) or any(type(e) is not Atom0Eq for e in eqs):
        return None
    if {frozenset((e.x, e.y)) for e in eqs} != want:
        return None
    return left.A


def _match_psi(f, a_pi):
    if type(f) is not QAtom2 or len(f.bound) != 1 or type(f.body) is not Implies:
        return None
    Z = f.bound[0]
    l, r = f.body.left, f.body.right
    if type(l) is Atom1Mem and type(r) is Atom1Mem and l.X == Z and r.X == Z and r.A == a_pi \
            and l.A != a_pi:
        return l.A
    return None


def _check_chi(g: Formula, h: int, a_pi, out: list):
    t = type(g)
    if t in FLAT_ATOMS:
        return
    if t is Not:
        return _check_chi(g.arg, h, a_pi, out)
    if t in (And, Or, Implies, Iff):
        _check_chi(g.left, h, a_pi, out)
        _check_chi(g.right, h, a_pi, out)
        return
    if t is QAtom1:
        if len(g.bound) > h:
            out.append(f"level-1 prefix longer than {h}: {render(g)}")
        return
    if t is QAtom2:
        if len(g.bound) > h:
            out.append(f"level-2 prefix longer than {h}: {render(g)}")
        body = g.body
        guard = None
        if type(body) is Implies:
            guard, rest = body.left, body.right
        if guard is None or sorted(
                (a.X, a.A) if type(a) is Atom1Mem else (None, None) for a in conjuncts(guard)
        ) != sorted((Z, a_pi) for Z in g.bound):
            out.append(f"level-2 atom not guarded by membership in {a_pi.name if a_pi else 'A_pi'}: {render(g)}")
            return
        for s in subformulas(rest):
            if type(s) is QAtom1 and len(s.bound) > h:
                out.append(f"level-1 prefix longer than {h}: {render(s)}")


def recognize_h(f: Formula, h: int) -> HFragmentReport:
    if h < 2:
        raise ValueError("h must be at least 2")
    rep = HFragmentReport(h)
    parts = conjuncts(f)
    rest = []
    for g in parts:
        if rep.xi_U is None and _match_universe(g) is not None:
            rep.xi_U, rep.universe = g, _match_universe(g)
            continue
        if rep.xi_pi is None and _match_xi_pi(g, h) is not None:
            rep.xi_pi, rep.a_pi = g, _match_xi_pi(g, h)
            continue
        rest.append(g)
    chi = []
    for g in rest:
        A = _match_psi(g, rep.a_pi) if rep.a_pi is not None else None
        if A is not None and A not in rep.psi:
            rep.psi[A] = g
        else:
            chi.append(g)
    rep.chi = chi
    if rep.xi_U is None:
        rep.violations.append("missing universe conjunct (forall z)(z in X_U)")
    if rep.xi_pi is None:
        rep.violations.append(f"missing conjunct defining A_pi as the subsets with fewer than {h} elements")
    colls = sorted(v for v in all_vars(f) if v.sort == 2)
    for A in colls:
        if A != rep.a_pi and A not in rep.psi:
            rep.violations.append(f"no conjunct confining {A.name} to A_pi")
    if not chi:
        rep.violations.append("empty chi part")
    for g in chi:
        _check_chi(g, h, rep.a_pi, rep.violations)
    if not is_3lqsr(f).member:
        rep.violations.append("outside the restricted fragment")
    rep.shape_ok = not rep.violations
    return rep


# ---------------------------------------------------------------------------
# flattening

@dataclass
class HSet:
    formulas: tuple
    fresh0: tuple = ()
    fresh1: tuple = ()

    def formula(self) -> Formula:
        return conjoin(self.formulas)

    def size(self) -> int:
        return sum(size(g) for g in self.formulas)


def _is_literal(g) -> bool:
    t = type(g)
    if t in FLAT_ATOMS or t in (QAtom1, QAtom2):
        return True
    return t is Not and type(g.arg) in FLAT_ATOMS


def _expand(g):
    """Classify a non-literal: ('R1', a) | ('R2', parts) | ('R3', alts) |
    ('R4'|'R5', quantified atom).  Implication and biconditional are read
    through their definitions."""
    t = type(g)
    if t is And:
        return "R2", (g.left, g.right)
    if t is Or:
        return "R3", (g.left, g.right)
    if t is Implies:
        return "R3", (Not(g.left), g.right)
    if t is Iff:
        return "R3", (And(g.left, g.right), And(Not(g.left), Not(g.right)))
    a = g.arg  # t is Not
    ta = type(a)
    if ta is Not:
        return "R1", a.arg
    if ta is Or:
        return "R2", (Not(a.left), Not(a.right))
    if ta is Implies:
        return "R2", (a.left, Not(a.right))
    if ta is And:
        return "R3", (Not(a.left), Not(a.right))
    if ta is Iff:
        return "R3", (And(a.left, Not(a.right)), And(Not(a.left), a.right))
    if ta is QAtom1:
        return "R4", a
    if ta is QAtom2:
        return "R5", a
    raise FormulaError(f"unexpected formula {render(g)}")


def flatten_h(f: Formula, h: int | None = None, report: HFragmentReport | None = None,
              fresh: FreshNames | None = None) -> Iterator[HSet]:
    """Lazily enumerate every closed rule set, one per sequence of
    disjunct choices.  Some branch is satisfiable iff f is, and every
    branch implies f."""
    if report is None and h is not None:
        report = recognize_h(f, h)
    if report is not None and report.shape_ok:
        start = [report.xi_U, report.xi_pi] + [report.psi[A] for A in sorted(report.psi)] + [conjoin(report.chi)]
    else:
        start = [f]
    fresh = fresh or FreshNames.for_formula(f)
    yield from _flatten(list(start), [], [], [], fresh)


def _flatten(todo, done, f0, f1, fresh):
    while todo:
        g = todo.pop(0)
        if _is_literal(g):
            if g not in done:
                done.append(g)
            continue
        rule, data = _expand(g)
        if rule == "R1":
            todo.insert(0, data)
        elif rule == "R2":
            todo[0:0] = list(data)
        elif rule in ("R4", "R5"):
            mapping = {v: fresh.variable(v.name, v.sort) for v in data.bound}
            (f0 if rule == "R4" else f1).extend(mapping.values())
            todo.insert(0, Not(substitute(data.body, mapping)))
        else:
            for alt in data:
                yield from _flatten([alt] + list(todo), list(done), list(f0), list(f1), fresh.copy())
            return
    yield HSet(tuple(done), tuple(f0), tuple(f1))


def propositional_reduction(clauses, h: int = 2):
    """Encode a CNF (lists of nonzero ints) as a bounded-prefix formula:
    letter i becomes ``x in P_i`` for one fixed individual x."""
    x = Variable("x", 0)
    XU = Variable("X_U", 1)
    A_pi = Variable("A_pi", 2)
    letters = sorted({abs(l) for c in clauses for l in c})
    P = {i: Variable(f"P{i}", 1) for i in letters}

    def lit(l):
        a = Atom0Mem(x, P[abs(l)])
        return a if l > 0 else Not(a)

    chi = conjoin(disjoin(lit(l) for l in c) for c in clauses) if clauses else Atom0Eq(x, x)
    return conjoin([xi_universe(XU), xi_pi(A_pi, h), chi])


# ---------------------------------------------------------------------------
# bounds valid for every flattened branch at once

def _occurrences(g, pol, acc):
    """Walk g at polarity pol (+1, -1, or 0 for both) collecting what the
    flattening rules may introduce: witnesses for negative quantified
    atoms, negative set equalities, positive level-2 atoms."""
    t = type(g)
    neg = pol <= 0
    if t is Atom1Eq:
        if neg:
            acc["neg_seteq"] += 1
    elif t is Not:
        _occurrences(g.arg, -pol, acc)
    elif t in (And, Or):
        _occurrences(g.left, pol, acc)
        _occurrences(g.right, pol, acc)
    elif t is Implies:
        _occurrences(g.left, -pol, acc)
        _occurrences(g.right, pol, acc)
    elif t is Iff:
        _occurrences(g.left, 0, acc)
        _occurrences(g.right, 0, acc)
    elif t is QAtom1:
        if neg:
            acc["w0"] += len(g.bound)
    elif t is QAtom2:
        acc["level2"] = True
        if pol >= 0:
            acc["pos2"].append(g)
        if neg:
            acc["w1"] += len(g.bound)
            _occurrences(g.body, -pol if pol else 0, acc)


def flat_bound(f: Formula) -> dict:
    """Upper bound on the small-model bound of every branch of f.

    Without level-2 quantifiers and collection variables a branch only
    needs its individuals plus one separating element per negated set
    equality, since universal level-1 atoms survive passing to a
    subdomain.  Otherwise the general bound is applied to the largest
    possible branch inventory.
    """
    from .normalizer import make_conjunction

    acc = {"w0": 0, "w1": 0, "neg_seteq": 0, "pos2": [], "level2": False}
    _occurrences(f, 1, acc)
    fv = free_vars(f)
    w0 = sum(1 for v in fv if v.sort == 0) + acc["w0"]
    w1 = sum(1 for v in fv if v.sort == 1) + acc["w1"]
    has2 = acc["level2"] or any(v.sort == 2 for v in fv)
    out = {"w0": w0, "w1": w1, "neg_seteq": acc["neg_seteq"], "phi": 0, "max_m": 0, "max_n": 0}
    if not has2:
        out["bound"] = max(1, w0 + min(acc["neg_seteq"], max(w1 - 1, 0)))
        out["kind"] = "level-1"
        return out
    psi = make_conjunction(list(dict.fromkeys(acc["pos2"])))
    phi, m, k = len(psi.phi_set), psi.max_m, psi.max_n
    out.update(phi=phi, max_m=m, max_n=k, kind="general")
    out["bound"] = max(1, w0 + max(w1 - 1, 0) + ((w1 ** m) * k * phi if phi else 0))
    return out


def branch_bound(f: Formula) -> int:
    return flat_bound(f)["bound"]
