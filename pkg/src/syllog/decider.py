"""Bounded model search.

For each normalized conjunction the search tries domain sizes
1, 2, ... up to its small-model bound.  At a fixed size the individual
and set variables are assigned by backtracking, with three-valued
pruning and symmetry breaking over interchangeable domain elements;
once they are all assigned, the collection variables are found by
grounding the level-2 literals over every tuple of subsets and handing
the resulting propositional problem to a DPLL solver.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .formulas import (
    Atom0Eq, Atom0Mem, Atom1Eq, Atom1Mem, And, Formula, Iff, Implies, Not, Or,
    QAtom1, QAtom2, free_vars,
)
from .normalizer import NormalizedConjunction, iter_normalize, make_conjunction
from .relativizer import bound as small_model_bound
from .restriction import RestrictionError, is_3lqsr
from .sat import Cnf, mk_and, mk_not, mk_or, solve
from .semantics import Interpretation, _ev, _ev3, evaluate

__all__ = [
    "Verdict", "SAT", "UNSAT", "UNKNOWN", "search_assignment", "decide_sat",
    "decide_conjunctions", "decide_sat_h", "SoundnessError",
]

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"


class SoundnessError(AssertionError):
    pass


@dataclass
class Verdict:
    status: str
    witness: Interpretation | None = None
    bound_used: int = 0
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        # wall-clock time is left out so the document is reproducible
        stats = {k: v for k, v in sorted(self.stats.items()) if k != "time"}
        doc = {"status": self.status, "bound_used": self.bound_used, "stats": stats}
        doc["witness"] = self.witness.to_json() if self.witness is not None else None
        return doc


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _vars_of(lit) -> set:
    return set(free_vars(lit))


class _Search:
    def __init__(self, psi: NormalizedConjunction, n: int, h: int | None = None,
                 linked: bool = True, stats: dict | None = None):
        self.psi = psi
        self.n = n
        self.h = h
        self.linked = linked
        self.stats = stats if stats is not None else {}
        self.stats.setdefault("nodes", 0)
        self.stats.setdefault("leaves", 0)
        self.stats.setdefault("sat_calls", 0)
        inv = psi.inventory
        self.vars0 = sorted(inv.free0)
        self.vars1 = sorted(inv.free1)
        self.vars2 = sorted(inv.free2)
        self.early = []
        self.units = []
        for lit in psi.literals:
            if type(lit) is QAtom2:
                continue
            core = lit.arg if type(lit) is Not else lit
            if type(core) is Atom1Mem:
                self.units.append(lit)
            else:
                self.early.append(lit)
        self.level2 = psi.level2
        self.by_var: dict = {v: [] for v in self.vars0 + self.vars1}
        for lit in self.early:
            for v in _vars_of(lit):
                if v in self.by_var:
                    self.by_var[v].append(lit)
        self.prime_found = False

    # -- helpers ---------------------------------------------------------
    def _ok(self, lits, e0, e1) -> bool:
        n = self.n
        for lit in lits:
            if _ev3(lit, n, e0, e1, {}) is False:
                return False
        return True

    def _classes(self, e0, e1):
        images = sorted(set(e0.values()))
        taken = set(images)
        sets = [e1[X][1] for X in self.vars1 if X in e1]
        groups: dict = {}
        for u in range(self.n):
            if u in taken:
                continue
            key = tuple(s >> u & 1 for s in sets)
            groups.setdefault(key, []).append(u)
        classes = [[u] for u in images] + sorted(groups.values())
        return images, classes

    def _cands0(self, x, e0, e1, images, classes):
        out = list(images) + [c[0] for c in classes if c[0] not in images]
        lits = self.by_var[x]
        res = []
        for u in out:
            e0[x] = u
            if self._ok(lits, e0, e1):
                res.append(u)
        del e0[x]
        return res

    def _options1(self, X, e0, e1, classes):
        lits = self.by_var[X]
        opts = []
        for c in classes:
            r = c[0]
            allowed = []
            for b in (0, 1):
                e1[X] = (1 << r, b << r)
                if self._ok(lits, e0, e1):
                    allowed.append(b)
            if not allowed:
                opts.append([])
                continue
            if allowed == [0, 1]:
                choices = []
                m = 0
                choices.append(0)
                for u in c:
                    m |= 1 << u
                    choices.append(m)
                opts.append(choices)
            elif allowed == [1]:
                m = 0
                for u in c:
                    m |= 1 << u
                opts.append([m])
            else:
                opts.append([0])
        del e1[X]
        return opts

    # -- search ------------------------------------------------------------
    def run(self):
        e0: dict = {}
        e1: dict = {}
        return self._rec(e0, e1)

    def _rec(self, e0, e1):
        self.stats["nodes"] += 1
        todo0 = [x for x in self.vars0 if x not in e0]
        todo1 = [X for X in self.vars1 if X not in e1]
        if not todo0 and not todo1:
            return self._leaf(e0, e1)
        images, classes = self._classes(e0, e1)
        best = None
        for x in todo0:
            c = self._cands0(x, e0, e1, images, classes)
            if best is None or len(c) < best[0]:
                best = (len(c), 0, x, c)
            if not c:
                return None
        for X in todo1:
            opts = self._options1(X, e0, e1, classes)
            count = 1
            for o in opts:
                count *= len(o)
            if count == 0:
                return None
            if best is None or count < best[0]:
                best = (count, 1, X, opts)
        _, sort, v, data = best
        full = (1 << self.n) - 1
        if sort == 0:
            for u in data:
                e0[v] = u
                r = self._rec(e0, e1)
                if r is not None:
                    return r
            del e0[v]
            return None
        lits = self.by_var[v]
        for combo in itertools.product(*data):
            m = 0
            for part in combo:
                m |= part
            e1[v] = (full, m)
            if not self._ok(lits, e0, e1):
                continue
            r = self._rec(e0, e1)
            if r is not None:
                return r
        del e1[v]
        return None

    def _leaf(self, e0, e1):
        self.stats["leaves"] += 1
        n = self.n
        for lit in self.early:
            if _ev3(lit, n, e0, e1, {}) is not True:
                return None
        self.prime_found = True
        sets = {X: m for X, (_, m) in e1.items()}
        m2 = self._collections(e0, sets)
        if m2 is None:
            return None
        return Interpretation(n, dict(e0), sets, m2)

    def _collections(self, e0, sets):
        if not self.vars2 and not self.level2:
            return {}
        n = self.n
        h = self.h
        letters: dict = {}

        def letter(A, mask):
            if h is not None and _popcount(mask) >= h:
                return False
            key = (A, mask)
            if key not in letters:
                letters[key] = len(letters) + 1
            return letters[key]

        constraints = []
        for lit in self.units:
            core = lit.arg if type(lit) is Not else lit
            a = letter(core.A, sets[core.X])
            constraints.append(a if lit is core else mk_not(a))
        e1 = dict(sets)
        for lit in self.level2:
            Zs = lit.bound
            cache: dict = {}
            for tup in itertools.product(range(1 << n), repeat=len(Zs)):
                for Z, U in zip(Zs, tup):
                    e1[Z] = U
                union = 0
                for U in tup:
                    union |= U
                r = self._resid(lit.body, e0, e1, letter, union, tup, cache)
                if r is False:
                    return None
                if r is not True:
                    constraints.append(r)
            for Z in Zs:
                del e1[Z]
        # letters take ids 1..len(letters); Tseitin variables come after
        cnf = Cnf(len(letters))
        for c in constraints:
            if c is False:
                return None
            cnf.assert_formula(c)
        self.stats["sat_calls"] += 1
        model = solve(cnf)
        if model is None:
            return None
        m2 = {A: set() for A in self.vars2}
        for (A, mask), i in letters.items():
            if model.get(i) and A in m2:
                m2[A].add(mask)
        return {A: frozenset(s) for A, s in m2.items()}

    def _resid(self, f, e0, e1, letter, union, tup, cache):
        t = type(f)
        if t is Atom0Mem:
            return bool(e1[f.X] >> e0[f.x] & 1)
        if t is Atom0Eq:
            return e0[f.x] == e0[f.y]
        if t is Atom1Eq:
            return e1[f.X] == e1[f.Y]
        if t is Atom1Mem:
            return letter(f.A, e1[f.X])
        if t is Not:
            return mk_not(self._resid(f.arg, e0, e1, letter, union, tup, cache))
        if t is And:
            a = self._resid(f.left, e0, e1, letter, union, tup, cache)
            if a is False:
                return False
            return mk_and([a, self._resid(f.right, e0, e1, letter, union, tup, cache)])
        if t is Or:
            a = self._resid(f.left, e0, e1, letter, union, tup, cache)
            if a is True:
                return True
            return mk_or([a, self._resid(f.right, e0, e1, letter, union, tup, cache)])
        if t is Implies:
            a = self._resid(f.left, e0, e1, letter, union, tup, cache)
            if a is False:
                return True
            return mk_or([mk_not(a), self._resid(f.right, e0, e1, letter, union, tup, cache)])
        if t is Iff:
            a = self._resid(f.left, e0, e1, letter, union, tup, cache)
            b = self._resid(f.right, e0, e1, letter, union, tup, cache)
            if a is True:
                return b
            if a is False:
                return mk_not(b)
            if b is True:
                return a
            if b is False:
                return mk_not(a)
            return mk_or([mk_and([a, b]), mk_and([mk_not(a), mk_not(b)])])
        if t is QAtom1:
            key = (id(f), tup)
            if key not in cache:
                cache[key] = self._inner(f, e0, e1, union)
            return cache[key]
        raise TypeError(f"unexpected node in a level-2 body: {f!r}")

    def _inner(self, f, e0, e1, union):
        # A linked atom can only be falsified by tuples drawn from the union
        # of the subsets bound by the enclosing level-2 quantifier.
        n = self.n
        rng = [u for u in range(n) if union >> u & 1] if self.linked else range(n)
        saved = [(z, e0.get(z)) for z in f.bound]
        try:
            for vals in itertools.product(rng, repeat=len(f.bound)):
                for z, u in zip(f.bound, vals):
                    e0[z] = u
                if not _ev(f.body, n, e0, e1, {}):
                    return False
            return True
        finally:
            for z, old in saved:
                if old is None:
                    e0.pop(z, None)
                else:
                    e0[z] = old


def search_assignment(psi: NormalizedConjunction, n: int, h: int | None = None,
                      linked: bool = True, stats: dict | None = None):
    """An interpretation over {0..n-1} satisfying psi, or None."""
    if n < 1:
        raise ValueError("domain size must be positive")
    return _Search(psi, n, h, linked, stats).run()


@dataclass
class _Track:
    psi: NormalizedConjunction
    bound: int
    prime_bound: int | None  # bound of psi without its level-2 literals
    prime_seen: bool = False
    done: str | None = None  # SAT / UNSAT / None while searching
    model: Interpretation | None = None
    searched: int = 0


def _tracks(conjs, precheck: bool):
    out = []
    for psi in conjs:
        b = small_model_bound(psi)
        pb = None
        if precheck and psi.level2:
            pb = small_model_bound(psi.without_level2())
            if pb >= b:
                pb = None
        out.append(_Track(psi, b, pb))
    return out


def _step(tr: _Track, n: int, h, linked, stats) -> None:
    s = _Search(tr.psi, n, h, linked, stats)
    m = s.run()
    tr.searched = n
    if s.prime_found:
        tr.prime_seen = True
    if m is not None:
        tr.done, tr.model = SAT, m
    elif n >= tr.bound:
        tr.done = UNSAT
    elif tr.prime_bound is not None and n >= tr.prime_bound and not tr.prime_seen:
        # the conjunction without its level-2 literals has no model up to its
        # own bound, so it is unsatisfiable, and so is the whole conjunction
        tr.done = UNSAT


def _run_one(args):
    psi, h, linked, precheck, cap = args
    [tr] = _tracks([psi], precheck)
    stats: dict = {}
    n = 0
    while tr.done is None:
        n += 1
        if cap is not None and n > cap:
            break
        _step(tr, n, h, linked, stats)
    return tr.done, tr.model, tr.searched, stats


def decide_conjunctions(conjs, max_domain: int | None = None, h: int | None = None,
                        linked: bool = True, precheck: bool = True, threads: int = 1,
                        complete: bool = True) -> Verdict:
    """Decide the disjunction of normalized conjunctions.

    Sizes are tried in ascending order across all conjunctions, so a SAT
    answer comes with a model of least size (ties go to the earliest
    conjunction).  With ``complete`` false (formulas outside the
    restricted fragment) exhaustion proves nothing and yields UNKNOWN.
    """
    t0 = time.perf_counter()
    conjs = list(conjs)
    stats: dict = {"conjunctions": len(conjs)}
    if threads != 1 and len(conjs) > 1:
        workers = threads if threads > 0 else (os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_one, [(p, h, linked, precheck, max_domain) for p in conjs]))
        tracks = _tracks(conjs, precheck)
        for tr, (done, model, searched, st) in zip(tracks, results):
            tr.done, tr.model, tr.searched = done, model, searched
            for k, v in st.items():
                stats[k] = stats.get(k, 0) + v
    else:
        tracks = _tracks(conjs, precheck)
        n = 0
        while True:
            live = [tr for tr in tracks if tr.done is None]
            if not live or any(tr.done == SAT for tr in tracks):
                break
            n += 1
            if max_domain is not None and n > max_domain:
                break
            for tr in live:
                _step(tr, n, h, linked, stats)
                if tr.done == SAT:
                    break
    sat = [tr for tr in tracks if tr.done == SAT]
    bound_used = max((tr.bound for tr in tracks), default=1)
    stats["searched_up_to"] = max((tr.searched for tr in tracks), default=0)
    stats["time"] = round(time.perf_counter() - t0, 6)
    if sat:
        best = min(sat, key=lambda tr: (tr.searched, tracks.index(tr)))
        return Verdict(SAT, best.model, bound_used, stats)
    if complete and tracks and all(tr.done == UNSAT for tr in tracks):
        return Verdict(UNSAT, None, bound_used, stats)
    if complete and not tracks:
        return Verdict(UNSAT, None, bound_used, stats)
    return Verdict(UNKNOWN, None, bound_used, stats)


def _finish(f: Formula, v: Verdict) -> Verdict:
    """Project the witness onto the input's free variables and check it."""
    if v.status != SAT:
        return v
    M = v.witness
    fv = free_vars(f)
    m0 = {x: M.m0.get(x, 0) for x in fv if x.sort == 0}
    m1 = {X: M.m1.get(X, 0) for X in fv if X.sort == 1}
    m2 = {A: M.m2.get(A, frozenset()) for A in fv if A.sort == 2}
    W = Interpretation(M.domain_size, m0, m1, m2)
    if not evaluate(W, f):
        raise SoundnessError("search produced an interpretation that does not satisfy the input")
    v.witness = W
    return v


def decide_sat(f: Formula, max_domain: int | None = None, max_disjuncts: int | None = None,
               precheck: bool = True, threads: int = 1, allow_unrestricted: bool = False,
               h: int | None = None, method: str = "search") -> Verdict:
    """Satisfiability of a formula of the restricted fragment.

    Raises RestrictionError for formulas outside the fragment unless
    ``allow_unrestricted``; then only SAT answers are conclusive.

    ``method="search"`` normalizes and runs the bounded search per
    conjunction; ``method="ground"`` encodes the whole formula at each
    domain size up to a bound valid for every conjunction.
    """
    report = is_3lqsr(f)
    restricted = report.member
    if not restricted and not allow_unrestricted:
        raise RestrictionError(report)
    if method == "ground":
        if h is not None:
            raise ValueError("collection confinement needs decide_sat_h")
        return _finish(f, _decide_ground(f, None, max_domain, precheck, complete=restricted))
    if method != "search":
        raise ValueError(f"unknown method {method!r}")
    conjs = list(iter_normalize(f, check=False, max_disjuncts=max_disjuncts))
    v = decide_conjunctions(conjs, max_domain, h=h, linked=restricted, precheck=precheck,
                            threads=threads, complete=restricted)
    return _finish(f, v)


def _contradictory(lits) -> bool:
    pos = set(lits)
    for g in lits:
        if type(g) is Not:
            a = g.arg
            if a in pos:
                return True
            if type(a) is Atom0Eq and a.x == a.y or type(a) is Atom1Eq and a.X == a.Y:
                return True
    return False


def decide_sat_h(f: Formula, h: int, max_domain: int | None = None,
                 method: str = "ground", max_branches: int | None = None,
                 precheck: bool = True, threads: int = 1) -> Verdict:
    """Satisfiability for the bounded-prefix shape (every collection
    confined to subsets of fewer than h elements).  Raises ShapeError if
    f does not have that shape.

    ``method="ground"`` encodes f directly at each domain size, up to a
    bound valid for every flattened branch; ``method="branch"`` flattens
    first and runs the bounded search on each branch.
    """
    from .hfragment import ShapeError, recognize_h

    report = recognize_h(f, h)
    if not report.shape_ok:
        raise ShapeError(report)
    if method == "branch":
        v = _decide_h_branches(f, report, max_domain, max_branches, precheck, threads)
    elif method == "ground":
        v = _decide_ground(f, report, max_domain, precheck)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _finish(f, v)


def _decide_h_branches(f, report, max_domain, max_branches, precheck, threads):
    from .hfragment import flatten_h
    from .normalizer import ResourceLimitError

    conjs = []
    branches = pruned = 0
    for hs in flatten_h(f, report=report):
        branches += 1
        if max_branches is not None and branches > max_branches:
            raise ResourceLimitError(f"more than {max_branches} branches")
        if _contradictory(hs.formulas):
            pruned += 1
            continue
        conjs.append(make_conjunction(list(hs.formulas)))
    v = decide_conjunctions(conjs, max_domain, h=report.h, linked=True, precheck=precheck,
                            threads=threads, complete=True)
    v.stats["branches"] = branches
    v.stats["pruned_branches"] = pruned
    return v


def _decide_ground(f, report, max_domain, precheck, complete=True):
    from .formulas import conjoin, conjuncts
    from .grounding import ground_model
    from .hfragment import branch_bound

    t0 = time.perf_counter()
    stats: dict = {"method": "ground"}
    full = branch_bound(f)
    # the conjuncts other than top-level level-2 atoms are implied by f;
    # if they have no model within their own bound, neither has f
    rest = [g for g in conjuncts(f) if type(g) is not QAtom2]
    pre = conjoin(rest) if precheck and rest and len(rest) < len(conjuncts(f)) else None
    pre_bound = branch_bound(pre) if pre is not None else None
    pre_seen = False
    stats["bound"] = full
    stats["pre_bound"] = pre_bound
    n = 0
    status, model = UNKNOWN, None
    while True:
        n += 1
        if max_domain is not None and n > max_domain:
            break
        m = ground_model(f, n, report, stats)
        if m is not None:
            status, model = SAT, m
            break
        if n >= full:
            status = UNSAT if complete else UNKNOWN
            break
        if pre is not None and not pre_seen:
            pre_seen = ground_model(pre, n, None, stats) is not None
            if not pre_seen and n >= pre_bound:
                status = UNSAT if complete else UNKNOWN
                break
    stats["searched_up_to"] = n if status != UNKNOWN else n - 1
    stats["time"] = round(time.perf_counter() - t0, 6)
    used = pre_bound if status == UNSAT and n < full else full
    return Verdict(status, model, used, stats)
