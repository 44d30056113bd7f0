"""Builders expressing elementary set-theoretic constructs as formulas.

Every builder returns a formula of the restricted fragment.  Each kind
also has a direct set-theoretic check (``holds``) computed from an
interpretation's masks and collections without going through formula
evaluation; the test suite compares the two exhaustively on small
domains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .formulas import (
    Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, And, Formula, FormulaError, FreshNames, Iff,
    Implies, Not, Or, QAtom1, QAtom2, Variable, conjoin, disjoin,
)
from .semantics import Interpretation

__all__ = [
    "EncodingRequest", "KINDS", "encode", "holds", "set_former", "encode_2ls",
    "encode_3lssp", "encode_pow_bounded", "encode_cartesian", "encode_cartesian_transversal",
    "encode_pow_star", "SIGNATURES",
]


def _fresh(*params) -> FreshNames:
    fresh = FreshNames()
    for p in params:
        if isinstance(p, Variable):
            fresh.reserve(p.name)
        elif isinstance(p, (list, tuple)):
            for q in p:
                fresh.reserve(q.name)
    return fresh


def _need(v, sort, what):
    if not isinstance(v, Variable) or v.sort != sort:
        raise FormulaError(f"{what} needs a sort-{sort} variable, got {v!r}")


def _falsum(z: Variable) -> Formula:
    return Not(Atom0Eq(z, z))


def _distinct_fail(zs) -> Formula:
    """Some two of zs coincide (false for a single variable)."""
    pairs = [Atom0Eq(a, b) for a, b in itertools.combinations(zs, 2)]
    return disjoin(pairs) if pairs else _falsum(zs[0])


def _distinct_fail_verbatim(zs) -> Formula:
    """The same condition written as the negation of all-pairs distinctness."""
    parts = [Not(Atom0Eq(a, b)) for a in zs for b in zs if a != b]
    return Not(conjoin(parts)) if parts else _falsum(zs[0])


# ---------------------------------------------------------------------------
# set former

def set_former(X: Variable, z: Variable, body: Formula) -> QAtom1:
    """``(forall z)(z in X <-> body)``: X is the set of z satisfying body."""
    from .formulas import FLAT_ATOMS, free_vars, subformulas
    _need(X, 1, "set former")
    _need(z, 0, "set former")
    if z not in free_vars(body):
        raise FormulaError("set-former body must mention its bound variable")
    for s in subformulas(body):
        if type(s) in (QAtom1, QAtom2):
            raise FormulaError("set-former body must be unquantified")
        if type(s) in FLAT_ATOMS and type(s) in (Atom1Eq, Atom1Mem):
            raise FormulaError("set-former body must be a level-0 formula")
    return QAtom1((z,), Iff(Atom0Mem(z, X), body))


# ---------------------------------------------------------------------------
# two-level literals

def encode_2ls(kind: str, *args: Variable) -> Formula:
    """Literals over individuals and sets: ``eq``, ``neq``, ``subseteq``,
    ``not-subseteq``, ``inter`` (X = Y & Z), ``union``, ``compl``,
    ``empty``, ``full``, ``mem``, ``eq0``, ``neq0``."""
    fresh = _fresh(*args)
    sig = SIGNATURES["2ls-" + kind] if ("2ls-" + kind) in SIGNATURES else None
    if sig is None:
        raise ValueError(f"unknown two-level literal kind {kind!r}")
    _check_args(kind, sig, args)
    if kind in ("eq0", "neq0"):
        a = Atom0Eq(*args)
        return a if kind == "eq0" else Not(a)
    if kind == "mem":
        return Atom0Mem(*args)
    if kind in ("eq", "neq"):
        a = Atom1Eq(*args)
        return a if kind == "eq" else Not(a)
    z = fresh.variable("z", 0, plain_ok=True)
    if kind in ("subseteq", "not-subseteq"):
        X, Y = args
        a = QAtom1((z,), Implies(Atom0Mem(z, X), Atom0Mem(z, Y)))
        return a if kind == "subseteq" else Not(a)
    if kind in ("inter", "union"):
        X, Y, Z = args
        op = And if kind == "inter" else Or
        return QAtom1((z,), Iff(op(Atom0Mem(z, Y), Atom0Mem(z, Z)), Atom0Mem(z, X)))
    if kind == "compl":
        X, Y = args
        return set_former(X, z, Not(Atom0Mem(z, Y)))
    if kind == "empty":
        return QAtom1((z,), Not(Atom0Mem(z, args[0])))
    if kind == "full":
        return QAtom1((z,), Atom0Mem(z, args[0]))
    raise ValueError(kind)


def encode_3lssp(kind: str, *args: Variable) -> Formula:
    """Literals over collections: ``eq``, ``neq``, ``subseteq``,
    ``not-subseteq``, ``inter``, ``union``, ``compl``, ``empty``,
    ``full``, ``mem`` (X in A), ``singleton1`` (X = {x}),
    ``singleton2`` (A = {X}), ``powerset`` (A = pow(X))."""
    key = "3lssp-" + kind
    if key not in SIGNATURES:
        raise ValueError(f"unknown three-level literal kind {kind!r}")
    _check_args(kind, SIGNATURES[key], args)
    fresh = _fresh(*args)
    if kind == "mem":
        return Atom1Mem(*args)
    if kind == "singleton1":
        X, x = args
        z = fresh.variable("z", 0, plain_ok=True)
        return set_former(X, z, Atom0Eq(z, x))
    Z = fresh.variable("Z", 1, plain_ok=True)
    if kind in ("eq", "neq", "subseteq", "not-subseteq"):
        A, B = args
        body = (Iff if kind in ("eq", "neq") else Implies)(Atom1Mem(Z, A), Atom1Mem(Z, B))
        a = QAtom2((Z,), body)
        return Not(a) if kind.startswith("n") else a
    if kind in ("inter", "union"):
        A, B, C = args
        op = And if kind == "inter" else Or
        return QAtom2((Z,), Iff(Atom1Mem(Z, A), op(Atom1Mem(Z, B), Atom1Mem(Z, C))))
    if kind == "compl":
        A, B = args
        return QAtom2((Z,), Iff(Atom1Mem(Z, A), Not(Atom1Mem(Z, B))))
    if kind == "empty":
        return QAtom2((Z,), Not(Atom1Mem(Z, args[0])))
    if kind == "full":
        return QAtom2((Z,), Atom1Mem(Z, args[0]))
    if kind == "singleton2":
        A, X = args
        return QAtom2((Z,), Iff(Atom1Mem(Z, A), Atom1Eq(Z, X)))
    if kind == "powerset":
        A, X = args
        z = fresh.variable("z", 0, plain_ok=True)
        return QAtom2((Z,), Iff(Atom1Mem(Z, A),
                                QAtom1((z,), Implies(Atom0Mem(z, Z), Atom0Mem(z, X)))))
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# powerset variants

def encode_pow_bounded(A: Variable, X: Variable, h: int, mode: str = "<=",
                       verbatim: bool = False) -> QAtom2:
    """A is the collection of subsets of X with at most (``<=``), fewer
    than (``<``) or exactly (``=``) h elements.

    With ``verbatim`` the size bound is written as the negation of
    pairwise distinctness instead of a disjunction of equalities."""
    _need(A, 2, "bounded powerset")
    _need(X, 1, "bounded powerset")
    if h < 1:
        raise ValueError("h must be at least 1")
    if mode not in ("<=", "<", "="):
        raise ValueError(f"unknown mode {mode!r}")
    fresh = _fresh(A, X)
    Z = fresh.variable("Z", 1, plain_ok=True)
    fail = _distinct_fail_verbatim if verbatim else _distinct_fail

    def at_most(k):
        # fewer than k+1 distinct members
        zs = tuple(fresh.variable(f"z{i}", 0, plain_ok=True) for i in range(1, k + 2))
        return QAtom1(zs, Implies(conjoin(Atom0Mem(z, Z) for z in zs), fail(zs)))

    z = fresh.variable("z", 0, plain_ok=True)
    parts = [QAtom1((z,), Implies(Atom0Mem(z, Z), Atom0Mem(z, X)))]
    if mode == "<=":
        parts.append(at_most(h))
    elif mode == "<":
        parts.append(at_most(h - 1))
    else:
        parts.append(at_most(h))
        parts.append(Not(at_most(h - 1)))
    return QAtom2((Z,), Iff(Atom1Mem(Z, A), conjoin(parts)))


def encode_cartesian(A: Variable, Xs) -> QAtom2:
    """The product construct as displayed in the literature: a member Z
    has at most n elements and every n-tuple drawn from Z lies in
    X_1 x ... x X_n componentwise.  Since a tuple may repeat one element,
    the nonempty members are exactly the subsets of the intersection of
    the X_i with at most n elements."""
    Xs = tuple(Xs)
    _need(A, 2, "product")
    for X in Xs:
        _need(X, 1, "product")
    if not Xs:
        raise ValueError("at least one factor is needed")
    n = len(Xs)
    fresh = _fresh(A, Xs)
    Z = fresh.variable("Z", 1, plain_ok=True)
    zs = tuple(fresh.variable(f"z{i}", 0, plain_ok=True) for i in range(1, n + 1))
    comp = QAtom1(zs, Implies(conjoin(Atom0Mem(z, Z) for z in zs),
                              conjoin(Atom0Mem(z, X) for z, X in zip(zs, Xs))))
    ws = tuple(fresh.variable(f"z{i}", 0, plain_ok=True) for i in range(1, n + 2))
    size = QAtom1(ws, Implies(conjoin(Atom0Mem(w, Z) for w in ws), _distinct_fail_verbatim(ws)))
    return QAtom2((Z,), Iff(Atom1Mem(Z, A), And(comp, size)))


def encode_cartesian_transversal(A: Variable, Xs) -> QAtom2:
    """Transversal reading: Z is contained in the union of the X_i and
    meets each X_i in exactly one element.  For pairwise disjoint X_i
    these are exactly the sets {u_1, ..., u_n} with u_i in X_i."""
    Xs = tuple(Xs)
    _need(A, 2, "product")
    for X in Xs:
        _need(X, 1, "product")
    if not Xs:
        raise ValueError("at least one factor is needed")
    fresh = _fresh(A, Xs)
    Z = fresh.variable("Z", 1, plain_ok=True)
    z = fresh.variable("z", 0, plain_ok=True)
    parts = [QAtom1((z,), Implies(Atom0Mem(z, Z), disjoin(Atom0Mem(z, X) for X in Xs)))]
    for X in Xs:
        w = fresh.variable("z", 0)
        parts.append(Not(QAtom1((w,), Implies(Atom0Mem(w, Z), Not(Atom0Mem(w, X))))))
        u, v = fresh.variable("z", 0), fresh.variable("z", 0)
        parts.append(QAtom1((u, v), Implies(
            conjoin([Atom0Mem(u, Z), Atom0Mem(v, Z), Atom0Mem(u, X), Atom0Mem(v, X)]),
            Atom0Eq(u, v))))
    return QAtom2((Z,), Iff(Atom1Mem(Z, A), conjoin(parts)))


def encode_pow_star(A: Variable, Xs) -> QAtom2:
    """Subsets of the union of the X_i meeting every X_i."""
    Xs = tuple(Xs)
    _need(A, 2, "pow*")
    for X in Xs:
        _need(X, 1, "pow*")
    if not Xs:
        raise ValueError("at least one set is needed")
    fresh = _fresh(A, Xs)
    Z = fresh.variable("Z", 1, plain_ok=True)
    z = fresh.variable("z", 0, plain_ok=True)
    parts = [QAtom1((z,), Implies(Atom0Mem(z, Z), disjoin(Atom0Mem(z, X) for X in Xs)))]
    for X in Xs:
        w = fresh.variable("z", 0)
        parts.append(Not(QAtom1((w,), Implies(Atom0Mem(w, Z), Not(Atom0Mem(w, X))))))
    return QAtom2((Z,), Iff(Atom1Mem(Z, A), conjoin(parts)))


# ---------------------------------------------------------------------------
# registry and direct semantics

# kind -> tuple of argument sorts; "*" means one or more sort-1 variables after A
SIGNATURES = {
    "2ls-eq": (1, 1), "2ls-neq": (1, 1), "2ls-subseteq": (1, 1), "2ls-not-subseteq": (1, 1),
    "2ls-inter": (1, 1, 1), "2ls-union": (1, 1, 1), "2ls-compl": (1, 1),
    "2ls-empty": (1,), "2ls-full": (1,), "2ls-mem": (0, 1), "2ls-eq0": (0, 0), "2ls-neq0": (0, 0),
    "3lssp-eq": (2, 2), "3lssp-neq": (2, 2), "3lssp-subseteq": (2, 2),
    "3lssp-not-subseteq": (2, 2), "3lssp-inter": (2, 2, 2), "3lssp-union": (2, 2, 2),
    "3lssp-compl": (2, 2), "3lssp-empty": (2,), "3lssp-full": (2,), "3lssp-mem": (1, 2),
    "3lssp-singleton1": (1, 0), "3lssp-singleton2": (2, 1), "3lssp-powerset": (2, 1),
}


def _check_args(kind, sig, args):
    if len(args) != len(sig):
        raise FormulaError(f"{kind} takes {len(sig)} arguments, got {len(args)}")
    for a, s in zip(args, sig):
        _need(a, s, kind)


@dataclass
class EncodingRequest:
    """``kind`` is one of KINDS; ``args`` are the variables (for the
    powerset variants: A, then the sets); ``h`` the size parameter."""
    kind: str
    args: tuple = ()
    h: int | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown encoding kind {self.kind!r}; expected one of {sorted(KINDS)}")
        self.args = tuple(self.args)

    def build(self) -> Formula:
        return encode(self)


KINDS = sorted([k for k in SIGNATURES] + [
    "set-former", "singleton1", "singleton2", "powerset", "pow-le-h", "pow-lt-h",
    "pow-eq-h", "cartesian", "cartesian-transversal", "pow-star",
])


def encode(req: EncodingRequest) -> Formula:
    k, a = req.kind, req.args
    if k.startswith("2ls-"):
        return encode_2ls(k[4:], *a)
    if k.startswith("3lssp-"):
        return encode_3lssp(k[6:], *a)
    if k in ("singleton1", "singleton2", "powerset"):
        return encode_3lssp(k, *a)
    if k == "set-former":
        X, z, body = a
        return set_former(X, z, body)
    if k in ("pow-le-h", "pow-lt-h", "pow-eq-h"):
        mode = {"pow-le-h": "<=", "pow-lt-h": "<", "pow-eq-h": "="}[k]
        if req.h is None:
            raise ValueError(f"{k} needs h")
        return encode_pow_bounded(a[0], a[1], req.h, mode, verbatim=req.options.get("verbatim", False))
    if k == "cartesian":
        return encode_cartesian(a[0], a[1:])
    if k == "cartesian-transversal":
        return encode_cartesian_transversal(a[0], a[1:])
    if k == "pow-star":
        return encode_pow_star(a[0], a[1:])
    raise ValueError(k)


def _pc(m: int) -> int:
    return bin(m).count("1")


def _subsets(mask: int):
    """All submasks of mask."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def holds(req: EncodingRequest, M: Interpretation) -> bool:
    """Whether the construct holds of M, computed directly on sets."""
    k, a = req.kind, req.args
    n = M.domain_size
    full = (1 << n) - 1
    every = frozenset(range(1 << n))
    v = M.value
    level = None
    if k.startswith("2ls-"):
        k, level = k[4:], 1
    elif k.startswith("3lssp-"):
        k, level = k[6:], 2
    if k in ("singleton1", "singleton2", "powerset"):
        level = 1 if k == "singleton1" else 2
    if level == 1:
        if k == "eq0":
            return v(a[0]) == v(a[1])
        if k == "neq0":
            return v(a[0]) != v(a[1])
        if k == "mem":
            return bool(v(a[1]) >> v(a[0]) & 1)
        if k == "eq":
            return v(a[0]) == v(a[1])
        if k == "neq":
            return v(a[0]) != v(a[1])
        if k == "subseteq":
            return v(a[0]) & ~v(a[1]) == 0
        if k == "not-subseteq":
            return v(a[0]) & ~v(a[1]) != 0
        if k == "inter":
            return v(a[0]) == v(a[1]) & v(a[2])
        if k == "union":
            return v(a[0]) == v(a[1]) | v(a[2])
        if k == "compl":
            return v(a[0]) == full & ~v(a[1])
        if k == "empty":
            return v(a[0]) == 0
        if k == "full":
            return v(a[0]) == full
        if k == "singleton1":
            return v(a[0]) == 1 << v(a[1])
    if level == 2:
        if k == "mem":
            return v(a[0]) in v(a[1])
        if k == "eq":
            return v(a[0]) == v(a[1])
        if k == "neq":
            return v(a[0]) != v(a[1])
        if k == "subseteq":
            return v(a[0]) <= v(a[1])
        if k == "not-subseteq":
            return not v(a[0]) <= v(a[1])
        if k == "inter":
            return v(a[0]) == v(a[1]) & v(a[2])
        if k == "union":
            return v(a[0]) == v(a[1]) | v(a[2])
        if k == "compl":
            return v(a[0]) == every - v(a[1])
        if k == "empty":
            return v(a[0]) == frozenset()
        if k == "full":
            return v(a[0]) == every
        if k == "singleton2":
            return v(a[0]) == frozenset({v(a[1])})
        if k == "powerset":
            return v(a[0]) == frozenset(_subsets(v(a[1])))
    if k == "set-former":
        from .semantics import evaluate
        X, z, body = a
        return v(X) == sum(1 << d for d in range(n)
                           if evaluate(_rebind0(M, z, d), body))
    if k in ("pow-le-h", "pow-lt-h", "pow-eq-h"):
        A, X = a
        h = req.h
        test = {"pow-le-h": lambda c: c <= h, "pow-lt-h": lambda c: c < h,
                "pow-eq-h": lambda c: c == h}[k]
        return v(A) == frozenset(U for U in _subsets(v(X)) if test(_pc(U)))
    if k == "cartesian":
        A, Xs = a[0], a[1:]
        # sets of at most n elements all of whose n-tuples are componentwise in the X_i
        want = set()
        for U in range(1 << n):
            elems = [d for d in range(n) if U >> d & 1]
            if len(elems) > len(Xs):
                continue
            if all(all(v(X) >> d & 1 for d, X in zip(tup, Xs))
                   for tup in itertools.product(elems, repeat=len(Xs))):
                want.add(U)
        return v(A) == frozenset(want)
    if k == "cartesian-transversal":
        A, Xs = a[0], a[1:]
        union = 0
        for X in Xs:
            union |= v(X)
        return v(A) == frozenset(U for U in _subsets(union)
                                 if all(_pc(U & v(X)) == 1 for X in Xs))
    if k == "pow-star":
        A, Xs = a[0], a[1:]
        union = 0
        for X in Xs:
            union |= v(X)
        return v(A) == frozenset(U for U in _subsets(union) if all(U & v(X) for X in Xs))
    raise ValueError(req.kind)


def _rebind0(M: Interpretation, z: Variable, d: int) -> Interpretation:
    m0 = dict(M.m0)
    m0[z] = d
    return Interpretation(M.domain_size, m0, M.m1, M.m2)
