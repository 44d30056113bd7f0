"""Finite interpretations and the satisfaction relation.

The domain is always ``{0, ..., n-1}``.  A set is stored as an int
bitmask over the domain, a collection as a frozenset of such masks.
Besides the two-valued ``evaluate`` there is a Kleene three-valued
``evaluate3`` over partial assignments, used for pruning by the search
procedures.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .formulas import (
    Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, And, Formula, FormulaError, Iff,
    Implies, Not, Or, QAtom1, QAtom2, SortError, Variable, free_vars,
)

__all__ = [
    "Interpretation", "UnassignedVariableError", "evaluate", "evaluate3",
    "rebind", "mask_of", "elements", "subsets_json", "PartialEnv",
]


class UnassignedVariableError(FormulaError):
    pass


def mask_of(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def elements(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def subsets_json(coll) -> list[list[int]]:
    return sorted(elements(u) for u in coll)


@dataclass(frozen=True)
class Interpretation:
    domain_size: int
    m0: Mapping[Variable, int] = field(default_factory=dict)
    m1: Mapping[Variable, int] = field(default_factory=dict)
    m2: Mapping[Variable, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        n = self.domain_size
        if not isinstance(n, int) or n < 1:
            raise ValueError("domain_size must be a positive integer")
        full = (1 << n) - 1
        for v, u in self.m0.items():
            if v.sort != 0 or not (0 <= u < n):
                raise SortError(f"bad individual value for {v.name}: {u!r}")
        for v, s in self.m1.items():
            if v.sort != 1 or s & ~full or s < 0:
                raise SortError(f"bad set value for {v.name}")
        fixed = {}
        for v, c in self.m2.items():
            if v.sort != 2:
                raise SortError(f"bad collection variable {v.name}")
            c = frozenset(c)
            if c and (max(c) > full or min(c) < 0):
                raise SortError(f"collection {v.name} holds a non-subset of the domain")
            fixed[v] = c
        object.__setattr__(self, "m0", dict(self.m0))
        object.__setattr__(self, "m1", dict(self.m1))
        object.__setattr__(self, "m2", fixed)

    @property
    def full(self) -> int:
        return (1 << self.domain_size) - 1

    def value(self, v: Variable):
        table = (self.m0, self.m1, self.m2)[v.sort]
        if v not in table:
            raise UnassignedVariableError(f"variable {v.name} (sort {v.sort}) is unassigned")
        return table[v]

    def assigns(self, v: Variable) -> bool:
        return v in (self.m0, self.m1, self.m2)[v.sort]

    def variables(self) -> set:
        return set(self.m0) | set(self.m1) | set(self.m2)

    @classmethod
    def build(cls, n: int, m0=None, m1=None, m2=None) -> "Interpretation":
        """Convenience constructor from plain Python values, keyed by name
        or Variable: ``m1={"X": {0, 2}}``, ``m2={"A": [set(), {0}]}``."""
        def key(k, s):
            return k if isinstance(k, Variable) else Variable(k, s)
        return cls(n,
                   {key(k, 0): v for k, v in (m0 or {}).items()},
                   {key(k, 1): mask_of(v) for k, v in (m1 or {}).items()},
                   {key(k, 2): frozenset(mask_of(u) for u in v) for k, v in (m2 or {}).items()})

    def restrict(self, vs: Iterable[Variable]) -> "Interpretation":
        vs = set(vs)
        return Interpretation(self.domain_size,
                              {v: u for v, u in self.m0.items() if v in vs},
                              {v: u for v, u in self.m1.items() if v in vs},
                              {v: u for v, u in self.m2.items() if v in vs})

    def to_json(self) -> dict:
        return {
            "domain_size": self.domain_size,
            "m0": {v.name: u for v, u in sorted(self.m0.items())},
            "m1": {v.name: elements(s) for v, s in sorted(self.m1.items())},
            "m2": {v.name: subsets_json(c) for v, c in sorted(self.m2.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict) -> "Interpretation":
        try:
            n = doc["domain_size"]
            return cls.build(n, doc.get("m0", {}), doc.get("m1", {}),
                             {k: [set(u) for u in c] for k, c in doc.get("m2", {}).items()})
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed interpretation: {e}") from None

    def __eq__(self, other):
        if not isinstance(other, Interpretation):
            return NotImplemented
        return (self.domain_size == other.domain_size and dict(self.m0) == dict(other.m0)
                and dict(self.m1) == dict(other.m1) and dict(self.m2) == dict(other.m2))

    def __hash__(self):
        return hash((self.domain_size, frozenset(self.m0.items()),
                     frozenset(self.m1.items()), frozenset(self.m2.items())))


def rebind(M: Interpretation, overrides: Iterable[tuple[Variable, object]] | Mapping = ()) -> Interpretation:
    """Return a copy of M with some variables reassigned.  Sets may be
    given as masks or iterables of elements."""
    if isinstance(overrides, Mapping):
        overrides = overrides.items()
    m0, m1, m2 = dict(M.m0), dict(M.m1), dict(M.m2)
    for v, val in overrides:
        if not isinstance(v, Variable):
            raise SortError(f"not a variable: {v!r}")
        if v.sort == 0:
            if not isinstance(val, int):
                raise SortError(f"{v.name} needs an element, got {val!r}")
            m0[v] = val
        elif v.sort == 1:
            m1[v] = val if isinstance(val, int) else mask_of(val)
        else:
            m2[v] = frozenset(u if isinstance(u, int) else mask_of(u) for u in val)
    return Interpretation(M.domain_size, m0, m1, m2)


# ---------------------------------------------------------------------------
# two-valued evaluation

def evaluate(M: Interpretation, f: Formula) -> bool:
    fn, fv = _compiled(f)
    for v in fv:
        if not M.assigns(v):
            raise UnassignedVariableError(f"variable {v.name} (sort {v.sort}) is unassigned")
    return fn(M.domain_size, dict(M.m0), dict(M.m1), M.m2)


def _ev(f, n, e0, e1, e2) -> bool:
    return _compiled(f)[0](n, e0, e1, e2)


# Formulas are compiled once into nested closures.  The nodes use slots,
# so the cache is keyed by id and keeps the node alive to pin the id.
_CACHE: dict = {}
_CACHE_LIMIT = 8192


def _compiled(f):
    hit = _CACHE.get(id(f))
    if hit is not None and hit[0] is f:
        return hit[1], hit[2]
    if len(_CACHE) >= _CACHE_LIMIT:
        _CACHE.clear()
    fn = _compile(f)
    _CACHE[id(f)] = (f, fn, free_vars(f))
    return fn, _CACHE[id(f)][2]


def _compile(f):
    t = type(f)
    if t is Atom0Mem:
        x, X = f.x, f.X
        return lambda n, e0, e1, e2: bool(e1[X] >> e0[x] & 1)
    if t is Atom0Eq:
        x, y = f.x, f.y
        return lambda n, e0, e1, e2: e0[x] == e0[y]
    if t is Atom1Mem:
        X, A = f.X, f.A
        return lambda n, e0, e1, e2: e1[X] in e2[A]
    if t is Atom1Eq:
        X, Y = f.X, f.Y
        return lambda n, e0, e1, e2: e1[X] == e1[Y]
    if t is Not:
        a = _compile(f.arg)
        return lambda n, e0, e1, e2: not a(n, e0, e1, e2)
    if t in (And, Or, Implies, Iff):
        a, b = _compile(f.left), _compile(f.right)
        if t is And:
            return lambda n, e0, e1, e2: a(n, e0, e1, e2) and b(n, e0, e1, e2)
        if t is Or:
            return lambda n, e0, e1, e2: a(n, e0, e1, e2) or b(n, e0, e1, e2)
        if t is Implies:
            return lambda n, e0, e1, e2: (not a(n, e0, e1, e2)) or b(n, e0, e1, e2)
        return lambda n, e0, e1, e2: a(n, e0, e1, e2) == b(n, e0, e1, e2)
    if t is QAtom1 or t is QAtom2:
        body = _compile(f.body)
        bound = f.bound
        level1 = t is QAtom1
        k = len(bound)

        def quant(n, e0, e1, e2):
            env = e0 if level1 else e1
            size = n if level1 else 1 << n
            saved = [(v, env.get(v)) for v in bound]
            try:
                if k == 1:
                    v = bound[0]
                    for u in range(size):
                        env[v] = u
                        if not body(n, e0, e1, e2):
                            return False
                    return True
                for tup in itertools.product(range(size), repeat=k):
                    for v, u in zip(bound, tup):
                        env[v] = u
                    if not body(n, e0, e1, e2):
                        return False
                return True
            finally:
                _restore(env, saved)
        return quant
    raise FormulaError(f"not a formula: {f!r}")


def _restore(env, saved):
    for v, old in saved:
        if old is None:
            env.pop(v, None)
        else:
            env[v] = old


# ---------------------------------------------------------------------------
# three-valued evaluation over partial assignments

@dataclass
class PartialEnv:
    """Partial assignment.  ``e0`` maps individuals to elements; ``e1``
    maps a set variable to ``(known, bits)`` masks (membership of element
    i is decided iff bit i of ``known`` is set); ``e2`` maps a collection
    variable to ``(ins, outs)``, the subsets decided in and out.  Absent
    variables are wholly unknown."""
    n: int
    e0: dict = field(default_factory=dict)
    e1: dict = field(default_factory=dict)
    e2: dict = field(default_factory=dict)

    @classmethod
    def from_interpretation(cls, M: Interpretation, include2: bool = True) -> "PartialEnv":
        full = M.full
        e2 = {}
        if include2:
            everything = frozenset(range(1 << M.domain_size))
            e2 = {v: (c, everything - c) for v, c in M.m2.items()}
        return cls(M.domain_size, dict(M.m0), {v: (full, s) for v, s in M.m1.items()}, e2)


def evaluate3(f: Formula, env: PartialEnv):
    """Kleene evaluation: True, False, or None (undetermined)."""
    return _ev3(f, env.n, env.e0, env.e1, env.e2)


def _ev3(f, n, e0, e1, e2):
    t = type(f)
    if t is Atom0Mem:
        x = e0.get(f.x)
        if x is None:
            s = e1.get(f.X)
            if s is not None and s[0] == (1 << n) - 1:
                if s[1] == 0:
                    return False
                if s[1] == s[0]:
                    return True
            return None
        s = e1.get(f.X)
        if s is None or not (s[0] >> x & 1):
            return None
        return bool(s[1] >> x & 1)
    if t is Atom0Eq:
        if f.x == f.y:
            return True
        a, b = e0.get(f.x), e0.get(f.y)
        if a is None or b is None:
            return None
        return a == b
    if t is Atom1Eq:
        if f.X == f.Y:
            return True
        a, b = e1.get(f.X), e1.get(f.Y)
        if a is None or b is None:
            return None
        both = a[0] & b[0]
        if (a[1] ^ b[1]) & both:
            return False
        full = (1 << n) - 1
        if a[0] == full and b[0] == full:
            return True
        return None
    if t is Atom1Mem:
        a = e1.get(f.X)
        if a is None or a[0] != (1 << n) - 1:
            return None
        c = e2.get(f.A)
        if c is None:
            return None
        if a[1] in c[0]:
            return True
        if a[1] in c[1]:
            return False
        return None
    if t is Not:
        r = _ev3(f.arg, n, e0, e1, e2)
        return None if r is None else not r
    if t is And:
        a = _ev3(f.left, n, e0, e1, e2)
        if a is False:
            return False
        b = _ev3(f.right, n, e0, e1, e2)
        if b is False:
            return False
        return True if (a and b) else None
    if t is Or:
        a = _ev3(f.left, n, e0, e1, e2)
        if a is True:
            return True
        b = _ev3(f.right, n, e0, e1, e2)
        if b is True:
            return True
        return False if (a is False and b is False) else None
    if t is Implies:
        return _ev3(Or(Not(f.left), f.right), n, e0, e1, e2)
    if t is Iff:
        a = _ev3(f.left, n, e0, e1, e2)
        if a is None:
            return None
        b = _ev3(f.right, n, e0, e1, e2)
        if b is None:
            return None
        return a == b
    if t is QAtom1:
        saved = [(v, e0.get(v)) for v in f.bound]
        result = True
        try:
            for tup in itertools.product(range(n), repeat=len(f.bound)):
                for v, u in zip(f.bound, tup):
                    e0[v] = u
                r = _ev3(f.body, n, e0, e1, e2)
                if r is False:
                    return False
                if r is None:
                    result = None
            return result
        finally:
            _restore(e0, saved)
    if t is QAtom2:
        full = (1 << n) - 1
        saved = [(v, e1.get(v)) for v in f.bound]
        result = True
        try:
            for tup in itertools.product(range(1 << n), repeat=len(f.bound)):
                for v, u in zip(f.bound, tup):
                    e1[v] = (full, u)
                r = _ev3(f.body, n, e0, e1, e2)
                if r is False:
                    return False
                if r is None:
                    result = None
            return result
        finally:
            _restore(e1, saved)
    raise FormulaError(f"not a formula: {f!r}")
