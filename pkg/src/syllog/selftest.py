"""Randomized property suites shipped with the package.

Each suite draws instances from a seeded generator, checks one property,
and returns a SuiteResult with the number of cases and failures.  The
``selftest`` CLI command and the acceptance tests both run these.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .formulas import Variable, render
from .generators import random_formula, random_interpretation, random_model_and_conjunction
from .normalizer import normalize
from .relativizer import RelConfig, bound, bound_terms, build_d_star, distinguish, relativize
from .semantics import Interpretation, evaluate, rebind

__all__ = ["SuiteResult", "SUITES", "run_suites", "suite_relativization", "suite_bound",
           "suite_flat_atoms", "suite_rebind_individuals", "suite_rebind_sets", "suite_distinguish",
           "suite_decider_oracle", "suite_normalizer", "mutated_relativize"]


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    examples: list = field(default_factory=list)
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def fail(self, detail):
        self.failures += 1
        if len(self.examples) < 5:
            self.examples.append(detail)

    def to_json(self) -> dict:
        return {"suite": self.name, "cases": self.cases, "failures": self.failures,
                "ok": self.ok, "examples": self.examples, **self.extra}


X_POOL = tuple(Variable(n, 1) for n in ("X", "Y", "W", "V", "U"))
x_POOL = tuple(Variable(n, 0) for n in ("x", "y", "u"))
A_POOL = tuple(Variable(n, 2) for n in ("A", "B"))


def _rel(M, ds, v1):
    return relativize(M, ds, RelConfig(frozenset(v1)))


def _random_subset(rng, n, must=()):
    s = set(must)
    for u in range(n):
        if rng.random() < 0.4:
            s.add(u)
    if not s:
        s.add(rng.randrange(n))
    return sorted(s)


# ---------------------------------------------------------------------------

def suite_relativization(seed: int = 0, count: int = 1000, relativize_fn=None) -> SuiteResult:
    """Relativizing a model of psi to D* (with V1' = free sets of psi)
    yields a model of psi."""
    rel = relativize_fn or relativize
    res = SuiteResult("relativization")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    for _ in range(count):
        M, psi = random_model_and_conjunction(rng)
        ds = build_d_star(M, psi)
        Ms, _ = rel(M, ds.elements, RelConfig(frozenset(psi.inventory.free1)))
        res.cases += 1
        if not evaluate(Ms, psi.formula()):
            res.fail({"psi": psi.render(), "model": M.to_json(), "d_star": ds.elements})
    res.seconds = time.perf_counter() - t0
    return res


def suite_bound(seed: int = 0, count: int = 1000) -> SuiteResult:
    """|D*| never exceeds the small-model bound."""
    res = SuiteResult("bound")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(count):
        M, psi = random_model_and_conjunction(rng)
        ds = build_d_star(M, psi)
        b = bound(psi)
        res.cases += 1
        worst = max(worst, len(ds.elements) / b)
        if len(ds.elements) > b:
            res.fail({"psi": psi.render(), "d_star": ds.elements, "bound": bound_terms(psi)})
    res.extra["max_ratio"] = round(worst, 4)
    res.seconds = time.perf_counter() - t0
    return res


def suite_flat_atoms(seed: int = 0, count: int = 1000) -> SuiteResult:
    """Flat atoms keep their truth value under relativization when the
    elements involved lie in D* and differing sets are separated."""
    res = SuiteResult("flat_atoms")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    for i in range(count):
        n = rng.randint(1, 6)
        M = random_interpretation(rng, n, x_POOL, X_POOL, A_POOL)
        part = "abcd"[i % 4]
        x, y = rng.choice(x_POOL), rng.choice(x_POOL)
        X, Y = rng.choice(X_POOL), rng.choice(X_POOL)
        v1 = [Z for Z in X_POOL if rng.random() < 0.6]
        if part == "a":
            ds = _random_subset(rng, n, (M.m0[x], M.m0[y]))
            Ms, _ = _rel(M, ds, v1)
            ok = (Ms.m0[x] == Ms.m0[y]) == (M.m0[x] == M.m0[y])
        elif part == "b":
            ds = _random_subset(rng, n, (M.m0[x],))
            Ms, _ = _rel(M, ds, v1)
            ok = bool(Ms.m1[X] >> Ms.m0[x] & 1) == bool(M.m1[X] >> M.m0[x] & 1)
        elif part == "c":
            ds = _random_subset(rng, n, distinguish(M, [X, Y]))
            Ms, _ = _rel(M, ds, v1)
            ok = (Ms.m1[X] == Ms.m1[Y]) == (M.m1[X] == M.m1[Y])
        else:
            ds = _random_subset(rng, n, distinguish(M, v1))
            Ms, _ = _rel(M, ds, v1)
            ok = all((Ms.m1[Z] in Ms.m2[A]) == (M.m1[Z] in M.m2[A]) for Z in v1 for A in A_POOL)
        res.cases += 1
        if not ok:
            res.fail({"part": part, "model": M.to_json(), "d_star": ds, "v1": [v.name for v in v1]})
    res.seconds = time.perf_counter() - t0
    return res


def suite_rebind_individuals(seed: int = 0, count: int = 1000) -> SuiteResult:
    """Rebinding individual variables to elements of D* commutes with
    relativization."""
    res = SuiteResult("rebind_individuals")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    zs = (Variable("z1", 0), Variable("z2", 0), Variable("x", 0))
    for _ in range(count):
        n = rng.randint(1, 6)
        M = random_interpretation(rng, n, x_POOL, X_POOL, A_POOL)
        ds = _random_subset(rng, n)
        v1 = [Z for Z in X_POOL if rng.random() < 0.6]
        k = rng.randint(1, 3)
        binds = {z: rng.choice(ds) for z in zs[:k]}
        Ms, idx = _rel(M, ds, v1)
        left = rebind(Ms, {z: idx[u] for z, u in binds.items()})
        right, _ = _rel(rebind(M, binds), ds, v1)
        res.cases += 1
        if left.m0 != right.m0 or left.m1 != right.m1:
            res.fail({"model": M.to_json(), "d_star": ds, "binds": {z.name: u for z, u in binds.items()}})
    res.seconds = time.perf_counter() - t0
    return res


def suite_rebind_sets(seed: int = 0, count: int = 1000) -> SuiteResult:
    """Rebinding set variables outside V1' to subsets of D* that are not
    images of V1' commutes with relativization (V1' extended by them)."""
    res = SuiteResult("rebind_sets")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    Zs = (Variable("Z1", 1), Variable("Z2", 1))
    done = 0
    while done < count:
        n = rng.randint(1, 6)
        M = random_interpretation(rng, n, x_POOL, X_POOL, A_POOL)
        ds = _random_subset(rng, n)
        v1 = [Z for Z in X_POOL if rng.random() < 0.6]
        dmask = sum(1 << u for u in ds)
        images = {M.m1[X] & dmask for X in v1}
        free = [U for U in _submasks(dmask) if U not in images]
        if not free:
            continue
        m = rng.randint(1, 2)
        binds = {Z: rng.choice(free) for Z in Zs[:m]}
        Ms, idx = _rel(M, ds, v1)
        left = rebind(Ms, {Z: _squeeze(U, idx) for Z, U in binds.items()})
        right, _ = _rel(rebind(M, binds), ds, list(v1) + list(binds))
        done += 1
        res.cases += 1
        if left != right:
            res.fail({"model": M.to_json(), "d_star": ds, "binds": {Z.name: U for Z, U in binds.items()}})
    res.seconds = time.perf_counter() - t0
    return res


def _submasks(mask):
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def _squeeze(mask, idx):
    return sum(1 << i for u, i in idx.items() if mask >> u & 1)


def suite_distinguish(seed: int = 0, count: int = 1000) -> SuiteResult:
    """The separating elements split every pair of different sets and
    number at most |W1| - 1."""
    res = SuiteResult("distinguish")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    for _ in range(count):
        n = rng.randint(1, 7)
        w1 = X_POOL[:rng.randint(1, 5)]
        M = random_interpretation(rng, n, (), w1, ())
        d = distinguish(M, w1)
        mask = sum(1 << u for u in d)
        ok = len(d) <= len(w1) - 1 and all(
            (M.m1[X] ^ M.m1[Y]) & mask for X, Y in itertools.combinations(w1, 2) if M.m1[X] != M.m1[Y])
        res.cases += 1
        if not ok:
            res.fail({"model": M.to_json(), "delta": d})
    res.seconds = time.perf_counter() - t0
    return res


def _envelope_formula(rng, max_bound: int = 3):
    """A random restricted formula whose normalized conjunctions all have
    bound at most max_bound (or None)."""
    from .restriction import is_3lqsr
    f = random_formula(rng, depth=2, max_prefix=2)
    if not is_3lqsr(f).member:
        return None, None
    conjs = normalize(f, check=False, max_disjuncts=64)
    if any(bound(c) > max_bound for c in conjs):
        return None, None
    return f, conjs


def suite_decider_oracle(seed: int = 0, count: int = 500, max_bound: int = 3) -> SuiteResult:
    """decide_sat agrees with brute-force enumeration up to size 3 on
    formulas whose small-model bound is at most 3."""
    from .decider import SAT, UNSAT, decide_sat
    from .oracle import brute_force_sat
    from .normalizer import ResourceLimitError

    res = SuiteResult("decider_oracle")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    counts = {SAT: 0, UNSAT: 0}
    while res.cases < count:
        try:
            f, _ = _envelope_formula(rng, max_bound)
        except ResourceLimitError:
            continue
        if f is None:
            continue
        v = decide_sat(f)
        sat, _ = brute_force_sat(f, max_n=max_bound)
        res.cases += 1
        counts[v.status] = counts.get(v.status, 0) + 1
        if (v.status == SAT) != sat or v.status not in (SAT, UNSAT):
            res.fail({"formula": render(f), "decider": v.status, "oracle": sat})
        elif v.status == SAT and not evaluate(v.witness, f):
            res.fail({"formula": render(f), "witness": v.witness.to_json()})
    res.extra["verdicts"] = counts
    res.seconds = time.perf_counter() - t0
    return res


def suite_normalizer(seed: int = 0, count: int = 500, max_n: int = 3) -> SuiteResult:
    """A formula and the disjunction of its normalized conjunctions have
    models of exactly the same sizes up to max_n."""
    from .oracle import models
    from .normalizer import ResourceLimitError

    res = SuiteResult("normalizer")
    rng = random.Random(seed)
    t0 = time.perf_counter()
    while res.cases < count:
        try:
            f, conjs = _envelope_formula(rng, max_n)
        except ResourceLimitError:
            continue
        if f is None:
            continue
        res.cases += 1
        for n in range(1, max_n + 1):
            a = next(models(f, n), None) is not None
            b = any(next(models(c.formula(), n), None) is not None for c in conjs)
            if a != b:
                res.fail({"formula": render(f), "size": n, "input": a, "normalized": b})
                break
    res.seconds = time.perf_counter() - t0
    return res


def mutated_relativize(M, d_star_set, cfg):
    """A deliberately broken relativization (no correction of collection
    images) used to check that the relativization suite can fail."""
    ds = sorted(set(d_star_set))
    index = {u: i for i, u in enumerate(ds)}
    dmask = sum(1 << u for u in ds)

    def squeeze(mask):
        return sum(1 << i for u, i in index.items() if mask >> u & 1)

    d = ds[0]
    m0 = {x: index.get(u, index[d]) for x, u in M.m0.items()}
    m1 = {X: squeeze(s & dmask) for X, s in M.m1.items()}
    m2 = {A: frozenset(squeeze(s) for s in c if s & ~dmask == 0) for A, c in M.m2.items()}
    return Interpretation(len(ds), m0, m1, m2), index


SUITES = {
    "relativization": suite_relativization,
    "bound": suite_bound,
    "flat_atoms": suite_flat_atoms,
    "rebind_individuals": suite_rebind_individuals,
    "rebind_sets": suite_rebind_sets,
    "distinguish": suite_distinguish,
    "decider_oracle": suite_decider_oracle,
    "normalizer": suite_normalizer,
}


def run_suites(seed: int = 0, budget: int = 200, names=None) -> list:
    """Run the named suites (all by default) with ``budget`` cases each;
    the two oracle suites get a fifth of that."""
    out = []
    for name in names or SUITES:
        fn = SUITES[name]
        k = budget if name not in ("decider_oracle", "normalizer") else max(1, budget // 5)
        out.append(fn(seed=seed, count=k))
    return out
