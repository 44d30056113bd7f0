"""Small propositional layer: residual formulas, Tseitin CNF, DPLL.

Residual formulas are built by ``mk_and``/``mk_or``/``mk_not`` over
positive integer letters and the constants True/False, simplifying as
they go.  Clauses are lists of nonzero ints (DIMACS style).
"""

from __future__ import annotations

__all__ = ["mk_and", "mk_or", "mk_not", "Cnf", "solve"]


def mk_not(a):
    if a is True:
        return False
    if a is False:
        return True
    if isinstance(a, int):
        return -a
    if a[0] == "not":
        return a[1]
    return ("not", a)


def mk_and(parts):
    out = []
    for p in parts:
        if p is False:
            return False
        if p is True:
            continue
        if isinstance(p, tuple) and p[0] == "and":
            out.extend(p[1])
        else:
            out.append(p)
    if not out:
        return True
    if len(out) == 1:
        return out[0]
    return ("and", tuple(out))


def mk_or(parts):
    out = []
    for p in parts:
        if p is True:
            return True
        if p is False:
            continue
        if isinstance(p, tuple) and p[0] == "or":
            out.extend(p[1])
        else:
            out.append(p)
    if not out:
        return False
    if len(out) == 1:
        return out[0]
    return ("or", tuple(out))


class Cnf:
    def __init__(self, nvars: int = 0):
        self.nvars = nvars
        self.clauses: list = []
        self.empty = False

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def add_clause(self, lits):
        lits = list(dict.fromkeys(lits))
        if any(-l in lits for l in lits):
            return
        if not lits:
            self.empty = True
        self.clauses.append(lits)

    def assert_formula(self, f):
        """Add clauses making f true (polarity-aware Tseitin)."""
        if f is True:
            return
        if f is False:
            self.add_clause([])
            return
        if isinstance(f, int):
            self.add_clause([f])
            return
        f = _nnf(f, True)
        if f[0] == "and":
            for g in f[1]:
                self.assert_formula(g)
            return
        self.add_clause([self._lit(g) for g in f[1]] if f[0] == "or" else [self._lit(f)])

    def _lit(self, f) -> int:
        # f in NNF; returns a literal implying f
        if isinstance(f, int):
            return f
        if f[0] == "or":
            v = self.new_var()
            self.add_clause([-v] + [self._lit(g) for g in f[1]])
            return v
        v = self.new_var()
        for g in f[1]:
            self.add_clause([-v, self._lit(g)])
        return v


def _nnf(f, pos):
    if isinstance(f, int):
        return f if pos else -f
    if f[0] == "not":
        return _nnf(f[1], not pos)
    op = f[0] if pos else ("or" if f[0] == "and" else "and")
    parts = [_nnf(g, pos) for g in f[1]]
    flat = []
    for p in parts:
        if isinstance(p, tuple) and p[0] == op:
            flat.extend(p[1])
        else:
            flat.append(p)
    return (op, tuple(flat))


def solve(cnf: Cnf, budget: int | None = None):
    """DPLL with two watched literals.  Returns a dict var -> bool, or
    None when unsatisfiable."""
    if cnf.empty:
        return None
    n = cnf.nvars
    value = [0] * (n + 1)  # 0 unknown, 1 true, -1 false
    trail: list = []
    watches: dict = {}
    clauses = []
    units = []
    for c in cnf.clauses:
        if len(c) == 1:
            units.append(c[0])
            continue
        clauses.append(list(c))
        idx = len(clauses) - 1
        watches.setdefault(c[0], []).append(idx)
        watches.setdefault(c[1], []).append(idx)

    def val(l):
        v = value[abs(l)]
        return v if l > 0 else -v

    def assign(l):
        value[abs(l)] = 1 if l > 0 else -1
        trail.append(l)

    def propagate(start):
        i = start
        while i < len(trail):
            l = -trail[i]
            i += 1
            ws = watches.get(l)
            if not ws:
                continue
            keep = []
            j = 0
            conflict = False
            while j < len(ws):
                ci = ws[j]
                j += 1
                c = clauses[ci]
                if c[0] == l:
                    c[0], c[1] = c[1], c[0]
                if val(c[0]) == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(c)):
                    if val(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    v0 = val(c[0])
                    if v0 == -1:
                        conflict = True
                        keep.extend(ws[j:])
                        break
                    if v0 == 0:
                        assign(c[0])
            watches[l] = keep
            if conflict:
                return False
        return True

    for u in units:
        v = val(u)
        if v == -1:
            return None
        if v == 0:
            assign(u)
    if not propagate(0):
        return None

    occurrences = [0] * (n + 1)
    for c in clauses:
        for l in c:
            occurrences[abs(l)] += 1
    order = sorted(range(1, n + 1), key=lambda v: -occurrences[v])
    steps = 0
    stack: list = []  # [trail mark, variable, flipped]
    pos = 0
    while True:
        while pos < len(order) and value[order[pos]] != 0:
            pos += 1
        if pos == len(order):
            return {v: value[v] == 1 for v in range(1, n + 1)}
        var = order[pos]
        steps += 1
        if budget is not None and steps > budget:
            raise RuntimeError("SAT budget exceeded")
        stack.append([len(trail), var, False, pos])
        assign(-var)
        ok = propagate(stack[-1][0])
        while not ok:
            while stack and stack[-1][2]:
                stack.pop()
            if not stack:
                return None
            top = stack[-1]
            for l in trail[top[0]:]:
                value[abs(l)] = 0
            del trail[top[0]:]
            top[2] = True
            assign(top[1])
            ok = propagate(top[0])
            pos = top[3]
