"""Three-level formulas: AST, concrete syntax, printing and bound-variable hygiene.

Variables carry a sort: 0 (individuals), 1 (sets of individuals) and
2 (collections of sets).  Quantifiers only bind sorts 0 and 1; a
``QAtom1`` binds individuals over a body of level-0 atoms, a ``QAtom2``
binds sets over a body that may contain level-0/1 atoms and ``QAtom1``
atoms but no further ``QAtom2``.

Text format::

    sort0 x y z ; sort1 X Y Z ; sort2 A B ;
    formula: (forall z)(z in X <-> !(z in Y)) & X in A

Without a header, sorts are inferred from usage (``a in b`` forces
``sort(b) = sort(a) + 1``); lower-case identifiers default to sort 0 and
upper-case ones to sort 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple

__all__ = [
    "Variable", "Formula", "Atom0Eq", "Atom0Mem", "Atom1Eq", "Atom1Mem",
    "QAtom1", "QAtom2", "Not", "And", "Or", "Implies", "Iff",
    "VarInventory", "FreshNames", "FormulaError", "ParseError", "SortError",
    "NestingError", "parse", "parse_document", "render", "render_document",
    "rename_apart", "inventory", "free_vars", "all_vars", "substitute",
    "expand_sugar", "size", "conjoin", "disjoin", "conjuncts", "disjuncts",
    "is_atom", "is_quantified", "subformulas", "var",
]


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class SortError(FormulaError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class NestingError(FormulaError):
    pass


class _VariableFields(NamedTuple):
    name: str
    sort: int


class Variable(_VariableFields):
    """A sorted variable.  A tuple underneath so hashing and comparison
    run at C speed; variables are dictionary keys everywhere."""
    __slots__ = ()

    def __new__(cls, name: str, sort: int):
        if not name:
            raise FormulaError("variable name must be nonempty")
        if sort not in (0, 1, 2):
            raise SortError(f"bad sort {sort!r} for {name}")
        return super().__new__(cls, name, sort)

    def __str__(self):
        return self.name


def var(name: str, sort: int) -> Variable:
    return Variable(name, sort)


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self):
        return render(self)


def _need(v: Variable, sort: int, where: str):
    if not isinstance(v, Variable):
        raise SortError(f"{where}: expected a variable, got {v!r}")
    if v.sort != sort:
        raise SortError(f"{where}: {v.name} has sort {v.sort}, expected {sort}")


@dataclass(frozen=True, slots=True)
class Atom0Eq(Formula):
    x: Variable
    y: Variable

    def __post_init__(self):
        _need(self.x, 0, "x = y")
        _need(self.y, 0, "x = y")


@dataclass(frozen=True, slots=True)
class Atom0Mem(Formula):
    x: Variable
    X: Variable

    def __post_init__(self):
        _need(self.x, 0, "x in X")
        _need(self.X, 1, "x in X")


@dataclass(frozen=True, slots=True)
class Atom1Eq(Formula):
    X: Variable
    Y: Variable

    def __post_init__(self):
        _need(self.X, 1, "X = Y")
        _need(self.Y, 1, "X = Y")


@dataclass(frozen=True, slots=True)
class Atom1Mem(Formula):
    X: Variable
    A: Variable

    def __post_init__(self):
        _need(self.X, 1, "X in A")
        _need(self.A, 2, "X in A")


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    """Derived connective; kept in the tree until a pass expands it."""
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    """Derived connective; kept in the tree until a pass expands it."""
    left: Formula
    right: Formula


_CONNECTIVES = (Not, And, Or, Implies, Iff)


def _check_body(body: Formula, level: int):
    # level 0: only level-0 atoms; level 1: level-0/1 atoms and QAtom1.
    stack = [body]
    while stack:
        g = stack.pop()
        t = type(g)
        if t is Not:
            stack.append(g.arg)
        elif t in (And, Or, Implies, Iff):
            stack.append(g.left)
            stack.append(g.right)
        elif t in (Atom0Eq, Atom0Mem):
            continue
        elif level == 0:
            if t in (QAtom1, QAtom2):
                raise NestingError("quantifier inside the body of a level-1 quantified atom")
            raise NestingError("level-1 atom inside the body of a level-1 quantified atom")
        elif t in (Atom1Eq, Atom1Mem, QAtom1):
            continue
        elif t is QAtom2:
            raise NestingError("QAtom2 nesting violation: level-2 atom inside a level-2 atom")
        else:
            raise FormulaError(f"not a formula: {g!r}")


@dataclass(frozen=True, slots=True)
class QAtom1(Formula):
    bound: tuple
    body: Formula

    def __post_init__(self):
        if not isinstance(self.bound, tuple):
            object.__setattr__(self, "bound", tuple(self.bound))
        if not self.bound:
            raise FormulaError("empty quantifier prefix")
        for v in self.bound:
            _need(v, 0, "(forall z...)")
        _check_body(self.body, 0)


@dataclass(frozen=True, slots=True)
class QAtom2(Formula):
    bound: tuple
    body: Formula

    def __post_init__(self):
        if not isinstance(self.bound, tuple):
            object.__setattr__(self, "bound", tuple(self.bound))
        if not self.bound:
            raise FormulaError("empty quantifier prefix")
        for v in self.bound:
            _need(v, 1, "(forall Z...)")
        _check_body(self.body, 1)


ATOMS = (Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, QAtom1, QAtom2)
FLAT_ATOMS = (Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem)


def is_atom(f: Formula) -> bool:
    return type(f) in ATOMS


def is_quantified(f: Formula) -> bool:
    return type(f) in (QAtom1, QAtom2)


# ---------------------------------------------------------------------------
# structural helpers

def conjoin(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        raise FormulaError("empty conjunction")
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = And(g, out)
    return out


def disjoin(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        raise FormulaError("empty disjunction")
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = Or(g, out)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten nested ``And`` nodes (associativity only)."""
    if type(f) is And:
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def disjuncts(f: Formula) -> list[Formula]:
    if type(f) is Or:
        return disjuncts(f.left) + disjuncts(f.right)
    return [f]


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        t = type(g)
        if t is Not:
            stack.append(g.arg)
        elif t in (And, Or, Implies, Iff):
            stack.append(g.right)
            stack.append(g.left)
        elif t in (QAtom1, QAtom2):
            stack.append(g.body)


def size(f: Formula) -> int:
    """Number of AST nodes, counting each bound variable of a prefix."""
    n = 0
    for g in subformulas(f):
        n += 1
        if type(g) in (QAtom1, QAtom2):
            n += len(g.bound)
    return n


def _atom_vars(g: Formula) -> tuple:
    t = type(g)
    if t is Atom0Eq:
        return (g.x, g.y)
    if t is Atom0Mem:
        return (g.x, g.X)
    if t is Atom1Eq:
        return (g.X, g.Y)
    if t is Atom1Mem:
        return (g.X, g.A)
    return ()


def free_vars(f: Formula) -> frozenset:
    out: set = set()

    def walk(g, bound):
        t = type(g)
        if t in FLAT_ATOMS:
            for v in _atom_vars(g):
                if v not in bound:
                    out.add(v)
        elif t is Not:
            walk(g.arg, bound)
        elif t in (And, Or, Implies, Iff):
            walk(g.left, bound)
            walk(g.right, bound)
        elif t in (QAtom1, QAtom2):
            walk(g.body, bound | frozenset(g.bound))

    walk(f, frozenset())
    return frozenset(out)


def all_vars(f: Formula) -> frozenset:
    out = set()
    for g in subformulas(f):
        out.update(_atom_vars(g))
        if type(g) in (QAtom1, QAtom2):
            out.update(g.bound)
    return frozenset(out)


def substitute(f: Formula, mapping: Mapping[Variable, Variable]) -> Formula:
    """Replace free occurrences of variables; targets must have the same sort.

    Not capture-avoiding: callers substitute fresh or otherwise
    non-clashing variables.
    """
    for a, b in mapping.items():
        if a.sort != b.sort:
            raise SortError(f"cannot substitute {b.name} (sort {b.sort}) for {a.name} (sort {a.sort})")
    if not mapping:
        return f
    return _subst(f, dict(mapping))


def _subst(g: Formula, m: dict) -> Formula:
    t = type(g)
    if t is Atom0Eq:
        return Atom0Eq(m.get(g.x, g.x), m.get(g.y, g.y))
    if t is Atom0Mem:
        return Atom0Mem(m.get(g.x, g.x), m.get(g.X, g.X))
    if t is Atom1Eq:
        return Atom1Eq(m.get(g.X, g.X), m.get(g.Y, g.Y))
    if t is Atom1Mem:
        return Atom1Mem(m.get(g.X, g.X), m.get(g.A, g.A))
    if t is Not:
        return Not(_subst(g.arg, m))
    if t in (And, Or, Implies, Iff):
        return t(_subst(g.left, m), _subst(g.right, m))
    if t in (QAtom1, QAtom2):
        inner = {k: v for k, v in m.items() if k not in g.bound}
        if not inner:
            return g
        return t(g.bound, _subst(g.body, inner))
    raise FormulaError(f"not a formula: {g!r}")


def expand_sugar(f: Formula, deep: bool = False) -> Formula:
    """Rewrite ``->`` and ``<->`` into ``!``, ``&``, ``|``.

    Quantified atoms are left untouched unless ``deep`` is set.
    ``a <-> b`` becomes ``(!a | b) & (a | !b)``.
    """
    t = type(f)
    if t is Implies:
        return Or(Not(expand_sugar(f.left, deep)), expand_sugar(f.right, deep))
    if t is Iff:
        a = expand_sugar(f.left, deep)
        b = expand_sugar(f.right, deep)
        return And(Or(Not(a), b), Or(a, Not(b)))
    if t is Not:
        return Not(expand_sugar(f.arg, deep))
    if t in (And, Or):
        return t(expand_sugar(f.left, deep), expand_sugar(f.right, deep))
    if deep and t in (QAtom1, QAtom2):
        return t(f.bound, expand_sugar(f.body, True))
    return f


# ---------------------------------------------------------------------------
# fresh names and hygiene

_SUFFIX = re.compile(r"^(.*)#(\d+)$")


class FreshNames:
    """Generates ``base#k`` names that avoid every name seen so far.

    ``#`` cannot appear in user identifiers, so a suffixed name never
    collides with a hand-written one; the counter is shared by all bases
    of one unit so names are unique across a whole run.
    """

    def __init__(self, taken: Iterable[str] = ()):
        self.taken: set[str] = set()
        self.counter = 0
        for name in taken:
            self.reserve(name)

    def reserve(self, name: str):
        self.taken.add(name)
        m = _SUFFIX.match(name)
        if m:
            self.counter = max(self.counter, int(m.group(2)))

    def reserve_formula(self, f: Formula):
        for v in all_vars(f):
            self.reserve(v.name)

    def name(self, base: str, plain_ok: bool = False) -> str:
        base = _SUFFIX.sub(r"\1", base)
        if plain_ok and base not in self.taken:
            self.taken.add(base)
            return base
        while True:
            self.counter += 1
            cand = f"{base}#{self.counter}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand

    def variable(self, base: str, sort: int, plain_ok: bool = False) -> Variable:
        return Variable(self.name(base, plain_ok), sort)

    def copy(self) -> "FreshNames":
        other = FreshNames()
        other.taken = set(self.taken)
        other.counter = self.counter
        return other

    @classmethod
    def for_formula(cls, *fs: Formula) -> "FreshNames":
        fresh = cls()
        for f in fs:
            fresh.reserve_formula(f)
        return fresh


def rename_apart(f: Formula, fresh: FreshNames | None = None) -> Formula:
    """Alpha-rename so every bound variable is bound by exactly one
    quantifier prefix and never also occurs free."""
    if fresh is None:
        fresh = FreshNames.for_formula(f)
    else:
        fresh.reserve_formula(f)
    free_names = {v.name for v in free_vars(f)}
    used_binders: set[str] = set()

    def walk(g):
        t = type(g)
        if t is Not:
            return Not(walk(g.arg))
        if t in (And, Or, Implies, Iff):
            return t(walk(g.left), walk(g.right))
        if t in (QAtom1, QAtom2):
            mapping = {}
            new_bound = []
            for v in g.bound:
                if v.name in free_names or v.name in used_binders or v in mapping:
                    nv = fresh.variable(v.name, v.sort)
                    mapping[v] = nv
                else:
                    nv = v
                used_binders.add(nv.name)
                new_bound.append(nv)
            body = _subst(g.body, mapping) if mapping else g.body
            return t(tuple(new_bound), walk(body))
        return g

    return walk(f)


@dataclass(frozen=True)
class VarInventory:
    free0: frozenset
    free1: frozenset
    free2: frozenset
    bound0: frozenset
    bound1: frozenset

    @property
    def w0(self) -> frozenset:
        return self.free0 | self.bound0

    @property
    def w1(self) -> frozenset:
        return self.free1 | self.bound1

    @property
    def w2(self) -> frozenset:
        return self.free2

    def to_json(self) -> dict:
        def names(s):
            return sorted(v.name for v in s)
        return {"w0": {"free": names(self.free0), "bound": names(self.bound0)},
                "w1": {"free": names(self.free1), "bound": names(self.bound1)},
                "w2": {"free": names(self.free2), "bound": []}}


def inventory(f: Formula) -> VarInventory:
    fv = free_vars(f)
    b0, b1 = set(), set()
    for g in subformulas(f):
        if type(g) is QAtom1:
            b0.update(g.bound)
        elif type(g) is QAtom2:
            b1.update(g.bound)
    by = {0: set(), 1: set(), 2: set()}
    for v in fv:
        by[v.sort].add(v)
    return VarInventory(frozenset(by[0]), frozenset(by[1]), frozenset(by[2]),
                        frozenset(b0), frozenset(b1))


# ---------------------------------------------------------------------------
# printing

def _r(f: Formula) -> str:
    t = type(f)
    if t is Atom0Eq:
        return f"{f.x.name} = {f.y.name}"
    if t is Atom0Mem:
        return f"{f.x.name} in {f.X.name}"
    if t is Atom1Eq:
        return f"{f.X.name} = {f.Y.name}"
    if t is Atom1Mem:
        return f"{f.X.name} in {f.A.name}"
    if t is Not:
        inner = _r(f.arg)
        if type(f.arg) in FLAT_ATOMS:
            return f"!({inner})"
        return "!" + inner
    if t in (QAtom1, QAtom2):
        names = " ".join(v.name for v in f.bound)
        return f"(forall {names})({_strip(f.body)})"
    op = {And: "&", Or: "|", Implies: "->", Iff: "<->"}[t]
    return f"({_operand(f.left)} {op} {_operand(f.right)})"


def _operand(f: Formula) -> str:
    return _r(f)


def _strip(f: Formula) -> str:
    s = _r(f)
    if type(f) in (And, Or, Implies, Iff):
        return s[1:-1]
    return s


def render(f: Formula) -> str:
    """Print a formula; binary connectives are always parenthesized."""
    return _r(f)


def render_document(f: Formula, extra: Iterable[Variable] = ()) -> str:
    vs = set(all_vars(f)) | set(extra)
    lines = []
    for s in (0, 1, 2):
        names = sorted(v.name for v in vs if v.sort == s)
        lines.append(f"sort{s} " + " ".join(names) + " ;" if names else f"sort{s} ;")
    return " ".join(lines) + "\nformula: " + _strip(f) + "\n"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<sym>[()=!&|;:])
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*(?:\#\d+)?)
""", re.VERBOSE)

_KEYWORDS = {"in", "forall", "sort0", "sort1", "sort2", "formula"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        # a comment only starts with '#' at a token boundary
        if text[pos] == "#":
            end = text.find("\n", pos)
            pos = len(text) if end < 0 else end
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and s in _KEYWORDS:
                kind = s
            elif kind in ("iff", "imp", "sym"):
                kind = s
            out.append(_Tok(kind, s, line, pos - line_start + 1))
        for i, ch in enumerate(s):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


# raw syntax tree: ("eq"|"in", a, b, tok) | ("not", f) | (op, l, r) | ("forall", [(name,tok)], body)

class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self, k=0):
        return self.toks[self.i + k]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def header(self):
        decls = {}
        seen = False
        while self.peek().kind in ("sort0", "sort1", "sort2"):
            seen = True
            t = self.next()
            sort = int(t.kind[-1])
            while self.peek().kind == "ident":
                it = self.next()
                if it.text in decls and decls[it.text] != sort:
                    raise SortError(f"{it.text} declared with two sorts", it.line, it.col)
                decls[it.text] = sort
            self.expect(";")
        if seen or self.peek().kind == "formula":
            self.expect("formula")
            self.expect(":")
        return decls if seen else None

    def formula(self):
        left = self.imp()
        while self.peek().kind == "<->":
            self.next()
            left = ("<->", left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek().kind == "->":
            self.next()
            return ("->", left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek().kind == "|":
            self.next()
            left = ("|", left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek().kind == "&":
            self.next()
            left = ("&", left, self.unary())
        return left

    def unary(self):
        if self.peek().kind == "!":
            self.next()
            return ("not", self.unary())
        return self.primary()

    def primary(self):
        t = self.peek()
        if t.kind == "(":
            if self.peek(1).kind == "forall":
                return self.quant()
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "ident":
            a = self.next()
            op = self.next()
            if op.kind not in ("=", "in"):
                raise ParseError(f"expected '=' or 'in' after {a.text}, found {op.text or 'end of input'!r}", op.line, op.col)
            b = self.expect("ident")
            return ("eq" if op.kind == "=" else "in", a, b, op)
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col)

    def quant(self):
        start = self.expect("(")
        self.expect("forall")
        names = []
        while self.peek().kind == "ident":
            names.append(self.next())
        if not names:
            t = self.peek()
            raise ParseError("empty quantifier prefix", t.line, t.col)
        self.expect(")")
        if self.peek().kind == "(" and self.peek(1).kind == "forall":
            body = self.quant()
            # (forall a)(forall b)(...) chains into one prefix
            return ("forall", names, body, start, True)
        self.expect("(")
        body = self.formula()
        self.expect(")")
        return ("forall", names, body, start, False)


def _resolve_sorts(raw, decls):
    strict = decls is not None
    sorts = dict(decls or {})
    eqs, mems, binders, order = [], [], [], []

    def collect(node):
        k = node[0]
        if k in ("eq", "in"):
            a, b = node[1], node[2]
            for t in (a, b):
                order.append(t)
            (eqs if k == "eq" else mems).append((a, b, node[3]))
        elif k == "not":
            collect(node[1])
        elif k == "forall":
            for t in node[1]:
                order.append(t)
            binders.append(node[1])
            collect(node[2])
        else:
            collect(node[1])
            collect(node[2])

    collect(raw)
    if strict:
        for t in order:
            if t.text not in sorts:
                raise SortError(f"undeclared identifier {t.text}", t.line, t.col)

    def propagate():
        changed = True
        while changed:
            changed = False
            for a, b, _ in eqs:
                for p, q in ((a, b), (b, a)):
                    if p.text in sorts and q.text not in sorts:
                        sorts[q.text] = sorts[p.text]
                        changed = True
            for a, b, _ in mems:
                if a.text in sorts and b.text not in sorts:
                    sorts[b.text] = sorts[a.text] + 1
                    changed = True
                elif b.text in sorts and a.text not in sorts:
                    sorts[a.text] = sorts[b.text] - 1
                    changed = True
            for group in binders:
                known = [sorts[t.text] for t in group if t.text in sorts]
                if known:
                    for t in group:
                        if t.text not in sorts:
                            sorts[t.text] = known[0]
                            changed = True

    propagate()
    for t in order:
        if t.text not in sorts:
            sorts[t.text] = 0 if t.text[0].islower() else 1
            propagate()

    for t in order:
        s = sorts[t.text]
        if s not in (0, 1, 2):
            raise SortError(f"{t.text} cannot be given a sort", t.line, t.col)
        if not strict and t.text[0].islower() and s != 0:
            raise SortError(f"lower-case identifier {t.text} used at sort {s}", t.line, t.col)
    for a, b, op in eqs:
        if sorts[a.text] != sorts[b.text] or sorts[a.text] == 2:
            raise SortError(f"ill-sorted equality {a.text} = {b.text}", op.line, op.col)
    for a, b, op in mems:
        if sorts[b.text] != sorts[a.text] + 1:
            raise SortError(f"ill-sorted membership {a.text} in {b.text}", op.line, op.col)
    for group in binders:
        ss = {sorts[t.text] for t in group}
        if len(ss) != 1 or ss & {2}:
            t = group[0]
            raise SortError("quantifier prefix must bind variables of one sort, 0 or 1", t.line, t.col)
    return sorts


def _build(node, sorts) -> Formula:
    k = node[0]
    if k == "eq":
        a, b = Variable(node[1].text, sorts[node[1].text]), Variable(node[2].text, sorts[node[2].text])
        return Atom0Eq(a, b) if a.sort == 0 else Atom1Eq(a, b)
    if k == "in":
        a, b = Variable(node[1].text, sorts[node[1].text]), Variable(node[2].text, sorts[node[2].text])
        return Atom0Mem(a, b) if a.sort == 0 else Atom1Mem(a, b)
    if k == "not":
        return Not(_build(node[1], sorts))
    if k == "forall":
        names, body, start, chained = node[1], node[2], node[3], node[4]
        bound = [Variable(t.text, sorts[t.text]) for t in names]
        inner = _build(body, sorts)
        cls = QAtom1 if bound[0].sort == 0 else QAtom2
        if chained and type(inner) is cls:
            bound = bound + list(inner.bound)
            inner = inner.body
        try:
            return cls(tuple(bound), inner)
        except NestingError as e:
            raise NestingError(f"{start.line}:{start.col}: {e}") from None
    op = {"&": And, "|": Or, "->": Implies, "<->": Iff}[k]
    return op(_build(node[1], sorts), _build(node[2], sorts))


def parse_document(text: str) -> tuple[Formula, dict]:
    """Parse text and also return the declared (or inferred) sort table."""
    p = _Parser(_tokenize(text))
    decls = p.header()
    raw = p.formula()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
    sorts = _resolve_sorts(raw, decls)
    f = _build(raw, sorts)
    declared = {n: Variable(n, s) for n, s in (decls or sorts).items()}
    return f, declared


def parse(text: str) -> Formula:
    return parse_document(text)[0]
