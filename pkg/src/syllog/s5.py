"""S5 modal logic: formulas, Kripke semantics, an independent oracle,
and the translation into the bounded-prefix set-theoretic language.

In S5 every world sees every world, so a model is just a nonempty set
of worlds with a valuation, and box/diamond quantify over all worlds.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .formulas import (
    Atom0Eq, Atom0Mem, Atom1Mem, Formula, Iff, Implies, Not, Or, And, QAtom1, QAtom2, Variable,
    conjoin, size,
)
from .hfragment import psi_confine, xi_pi, xi_universe
from .semantics import Interpretation

__all__ = [
    "ModalFormula", "Letter", "MNot", "MAnd", "MOr", "MImp", "Box", "Dia",
    "ModalParseError", "parse_modal", "render_modal", "modal_subformulas", "letters",
    "KripkeModel", "kripke_eval", "s5_oracle", "s5_models", "TranslationBundle",
    "translate_s5", "decide_s5", "is_valid", "transfer_model", "enumerate_modal",
    "random_modal", "AXIOMS",
]

SATISFIABLE, UNSATISFIABLE = "satisfiable", "unsatisfiable"


class ModalFormula:
    def __str__(self):
        return render_modal(self)


@dataclass(frozen=True)
class Letter(ModalFormula):
    name: str


@dataclass(frozen=True)
class MNot(ModalFormula):
    arg: ModalFormula


@dataclass(frozen=True)
class MAnd(ModalFormula):
    left: ModalFormula
    right: ModalFormula


@dataclass(frozen=True)
class MOr(ModalFormula):
    left: ModalFormula
    right: ModalFormula


@dataclass(frozen=True)
class MImp(ModalFormula):
    left: ModalFormula
    right: ModalFormula


@dataclass(frozen=True)
class Box(ModalFormula):
    arg: ModalFormula


@dataclass(frozen=True)
class Dia(ModalFormula):
    arg: ModalFormula


_UNARY = {MNot: "~", Box: "[]", Dia: "<>"}
_BINARY = {MAnd: "&", MOr: "|", MImp: "->"}


def render_modal(f: ModalFormula) -> str:
    t = type(f)
    if t is Letter:
        return f.name
    if t in _UNARY:
        return _UNARY[t] + render_modal(f.arg)
    return f"({render_modal(f.left)} {_BINARY[t]} {render_modal(f.right)})"


# ---------------------------------------------------------------------------
# parsing

class ModalParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(?P<letter>[a-z][a-z0-9]*)|(?P<op>->|\[\]|<>|[~&|()]))")


def _tokens(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ModalParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        if m.group("letter"):
            out.append(("letter", m.group("letter"), m.start("letter")))
        else:
            out.append((m.group("op"), None, m.start("op")))
        pos = m.end()
    out.append(("eof", None, len(text)))
    return out


def parse_modal(text: str) -> ModalFormula:
    """Grammar: ``~ [] <>`` bind tightest, then ``&``, ``|``, and
    right-associative ``->``."""
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i][0]

    def take(kind):
        nonlocal i
        if toks[i][0] != kind:
            raise ModalParseError(f"expected {kind!r}, found {toks[i][0]!r}", toks[i][2])
        i += 1
        return toks[i - 1]

    def imp():
        left = disj()
        if peek() == "->":
            take("->")
            return MImp(left, imp())
        return left

    def disj():
        f = conj()
        while peek() == "|":
            take("|")
            f = MOr(f, conj())
        return f

    def conj():
        f = unary()
        while peek() == "&":
            take("&")
            f = MAnd(f, unary())
        return f

    def unary():
        k = peek()
        if k == "~":
            take("~")
            return MNot(unary())
        if k == "[]":
            take("[]")
            return Box(unary())
        if k == "<>":
            take("<>")
            return Dia(unary())
        if k == "(":
            take("(")
            f = imp()
            take(")")
            return f
        if k == "letter":
            return Letter(take("letter")[1])
        raise ModalParseError(f"unexpected {k!r}", toks[i][2])

    f = imp()
    take("eof")
    return f


# ---------------------------------------------------------------------------
# semantics

def modal_subformulas(f: ModalFormula) -> list:
    """Distinct subformulas, children before parents."""
    out: dict = {}

    def walk(g):
        if g in out:
            return
        if type(g) in _UNARY:
            walk(g.arg)
        elif type(g) in _BINARY:
            walk(g.left)
            walk(g.right)
        out[g] = None

    walk(f)
    return list(out)


def letters(f: ModalFormula) -> list:
    return sorted({g.name for g in modal_subformulas(f) if type(g) is Letter})


@dataclass(frozen=True)
class KripkeModel:
    """S5 model: worlds 0..k-1 (all mutually accessible) and a valuation."""
    worlds: int
    valuation: dict = field(default_factory=dict)  # letter -> frozenset of worlds


def _truth_sets(K: KripkeModel, f: ModalFormula) -> dict:
    W = frozenset(range(K.worlds))
    val: dict = {}
    for g in modal_subformulas(f):
        t = type(g)
        if t is Letter:
            val[g] = frozenset(K.valuation.get(g.name, frozenset())) & W
        elif t is MNot:
            val[g] = W - val[g.arg]
        elif t is MAnd:
            val[g] = val[g.left] & val[g.right]
        elif t is MOr:
            val[g] = val[g.left] | val[g.right]
        elif t is MImp:
            val[g] = (W - val[g.left]) | val[g.right]
        elif t is Box:
            val[g] = W if val[g.arg] == W else frozenset()
        else:
            val[g] = W if val[g.arg] else frozenset()
    return val


def kripke_eval(K: KripkeModel, w: int, f: ModalFormula) -> bool:
    return w in _truth_sets(K, f)[f]


def s5_models(f: ModalFormula):
    """Every S5 model up to duplicate worlds: a nonempty set of distinct
    valuations of the letters of f, with the designated world first."""
    ls = letters(f)
    types = list(itertools.product((False, True), repeat=len(ls)))
    for k in range(1, len(types) + 1):
        for chosen in itertools.combinations(types, k):
            for first in range(k):
                order = [chosen[first]] + [c for j, c in enumerate(chosen) if j != first]
                val = {p: frozenset(w for w, ty in enumerate(order) if ty[i]) for i, p in enumerate(ls)}
                yield KripkeModel(k, val), 0


def s5_oracle(f: ModalFormula):
    """``(SATISFIABLE, (K, w))`` or ``(UNSATISFIABLE, None)``.

    A model can always be shrunk to one world per distinct valuation
    (worlds with the same valuation agree on every formula under the
    universal relation), so the enumeration is complete."""
    for K, w in s5_models(f):
        if kripke_eval(K, w, f):
            return SATISFIABLE, (K, w)
    return UNSATISFIABLE, None


# ---------------------------------------------------------------------------
# translation

@dataclass
class TranslationBundle:
    phi: ModalFormula
    defining: Formula | None
    target: Formula
    side: tuple
    var_map: dict
    x: Variable
    universe: Variable
    a_pi: Variable
    a_r: Variable

    def formula(self) -> Formula:
        core = self.target if self.defining is None else And(self.defining, self.target)
        if not self.side:
            return core
        xi_w, xi_p, psi1, chi1 = self.side
        return conjoin([xi_w, xi_p, psi1, And(chi1, core)])

    def size_ratio(self) -> float:
        return size(self.formula()) / _modal_size(self.phi)


def _modal_size(f):
    return len([g for g in _all_nodes(f)])


def _all_nodes(f):
    yield f
    if type(f) in _UNARY:
        yield from _all_nodes(f.arg)
    elif type(f) in _BINARY:
        yield from _all_nodes(f.left)
        yield from _all_nodes(f.right)


def translate_s5(phi: ModalFormula, include_side: bool = True) -> TranslationBundle:
    z = Variable("z", 0)
    x = Variable("x", 0)
    subs = modal_subformulas(phi)
    var_map = {}
    k = 0
    for g in subs:
        if type(g) is Letter:
            var_map[g] = Variable(f"XL_{g.name}", 1)
        else:
            k += 1
            var_map[g] = Variable(f"XS_{k}", 1)

    def mem(g):
        return Atom0Mem(z, var_map[g])

    def all_in(g):
        return QAtom1((z,), mem(g))

    def none_in(g):
        return QAtom1((z,), Not(mem(g)))

    clauses = {}

    def T(g):
        # Lambda is represented by the empty list of clauses
        if g in clauses:
            return []
        t = type(g)
        out: list = []
        if t is Letter:
            return out
        X = mem(g)
        if t is MNot:
            out.append(QAtom1((z,), Iff(X, Not(mem(g.arg)))))
            out += T(g.arg)
        elif t in (MAnd, MOr, MImp):
            op = {MAnd: And, MOr: Or, MImp: Implies}[t]
            out.append(QAtom1((z,), Iff(X, op(mem(g.left), mem(g.right)))))
            out += T(g.left)
            out += T(g.right)
        elif t is Box:
            out.append(And(Implies(all_in(g.arg), all_in(g)),
                           Implies(Not(all_in(g.arg)), none_in(g))))
            out += T(g.arg)
        else:
            out.append(And(Implies(Not(none_in(g.arg)), all_in(g)),
                           Implies(none_in(g.arg), none_in(g))))
            out += T(g.arg)
        clauses[g] = True
        return out

    parts = T(phi)
    defining = conjoin(parts) if parts else None
    target = Atom0Mem(x, var_map[phi])
    XU = Variable("X_U", 1)
    A_pi = Variable("A_pi3", 2)
    A_R = Variable("A_R", 2)
    side: tuple = ()
    if include_side:
        Z = Variable("Z", 1)
        z1, z2, z3 = (Variable(f"z{i}", 0) for i in (1, 2, 3))
        chi1 = QAtom2((Z,), Implies(
            Atom1Mem(Z, A_pi),
            Iff(Atom1Mem(Z, A_R), QAtom1((z1, z2, z3), Implies(
                And(And(Atom0Mem(z1, Z), Atom0Mem(z2, Z)), Atom0Mem(z3, Z)),
                Or(Or(Atom0Eq(z1, z2), Atom0Eq(z2, z3)), Atom0Eq(z1, z3)))))))
        side = (xi_universe(XU), xi_pi(A_pi, 3), psi_confine(A_R, A_pi), chi1)
    return TranslationBundle(phi, defining, target, side, var_map, x, XU, A_pi, A_R)


def transfer_model(bundle: TranslationBundle, K: KripkeModel, w: int) -> Interpretation:
    """Interpretation over the worlds of K built from the truth sets of
    the subformulas, with x at w."""
    val = _truth_sets(K, bundle.phi)
    n = K.worlds
    m1 = {X: sum(1 << v for v in val[g]) for g, X in bundle.var_map.items()}
    m2 = {}
    if bundle.side:
        small = frozenset(U for U in range(1 << n) if bin(U).count("1") < 3)
        m1[bundle.universe] = (1 << n) - 1
        m2[bundle.a_pi] = small
        m2[bundle.a_r] = frozenset(U for U in small if bin(U).count("1") <= 2)
    return Interpretation(n, {bundle.x: w}, m1, m2)


def decide_s5(phi: ModalFormula, include_side: bool = True, method: str = "ground",
              max_domain: int | None = None):
    """``(SATISFIABLE | UNSATISFIABLE | "unknown", verdict)`` via the
    set-theoretic decider on the translation."""
    from .decider import SAT, UNSAT, decide_sat, decide_sat_h

    bundle = translate_s5(phi, include_side)
    f = bundle.formula()
    if include_side:
        v = decide_sat_h(f, 3, max_domain=max_domain, method=method)
    else:
        v = decide_sat(f, max_domain=max_domain, method=method)
    if v.status == SAT:
        return SATISFIABLE, v
    if v.status == UNSAT:
        return UNSATISFIABLE, v
    return "unknown", v


def is_valid(phi: ModalFormula, **kw) -> bool:
    status, _ = decide_s5(MNot(phi), **kw)
    if status == "unknown":
        raise RuntimeError("validity undetermined within the domain cap")
    return status == UNSATISFIABLE


# ---------------------------------------------------------------------------
# corpora

_p = Letter("p")
AXIOMS = {
    "T": MImp(Box(_p), _p),
    "5": MImp(Dia(_p), Box(Dia(_p))),
    "B": MImp(_p, Box(Dia(_p))),
    "4": MImp(Box(_p), Box(Box(_p))),
    "D": MImp(Box(_p), Dia(_p)),
}


def enumerate_modal(names=("p", "q"), max_connectives: int = 3):
    """Every formula with at most the given number of connectives."""
    by_size: list = [[Letter(n) for n in names]]
    for k in range(1, max_connectives + 1):
        layer = []
        for c in (MNot, Box, Dia):
            layer += [c(a) for a in by_size[k - 1]]
        for i in range(k):
            for a in by_size[i]:
                for b in by_size[k - 1 - i]:
                    layer += [MAnd(a, b), MOr(a, b), MImp(a, b)]
        by_size.append(layer)
    for layer in by_size:
        yield from layer


def random_modal(rng, depth: int = 4, names=("p", "q")) -> ModalFormula:
    if depth == 0 or rng.random() < 0.2:
        return Letter(rng.choice(names))
    c = rng.choice((MNot, Box, Dia, MAnd, MOr, MImp))
    if c in _UNARY:
        return c(random_modal(rng, depth - 1, names))
    return c(random_modal(rng, depth - 1, names), random_modal(rng, depth - 1, names))
